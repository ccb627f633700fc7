/*
 * Golden fixture generator backed by the system libjpeg.
 *
 * Modes:
 *   compress   <w> <h> <ch> <qf> <dct(0=islow,2=float)> <raw_in> <jpeg_out>
 *   decompress <jpeg_in> <dct(0=islow,2=float)> <raw_out>
 *   coefdump   <jpeg_in> <coef_out> <qtbl_out>
 *   fromcoef   <w> <h> <ch> <qf> <coef_in> <jpeg_out>
 *
 * Raw images are 8-bit interleaved (gray or RGB), row-major.
 * Coefficient dumps are int16 LE, per component plane, blocks row-major,
 * 64 natural-order coefficients per block.  Quant table dumps are uint16
 * LE, 64 natural-order entries per component.
 */

#include <stdio.h>
#include <stdlib.h>
#include <string.h>
#include <jpeglib.h>

static void die(const char *msg)
{
    fprintf(stderr, "golden_harness: %s\n", msg);
    exit(1);
}

static unsigned char *read_file(const char *path, long *size)
{
    FILE *f = fopen(path, "rb");
    if (!f) die("cannot open input");
    fseek(f, 0, SEEK_END);
    *size = ftell(f);
    fseek(f, 0, SEEK_SET);
    unsigned char *buf = malloc(*size);
    if (fread(buf, 1, *size, f) != (size_t)*size) die("short read");
    fclose(f);
    return buf;
}

static void do_compress(int w, int h, int ch, int qf, int dct,
                        const char *raw_in, const char *jpeg_out)
{
    long size;
    unsigned char *raw = read_file(raw_in, &size);
    if (size != (long)w * h * ch) die("raw size mismatch");

    struct jpeg_compress_struct cinfo;
    struct jpeg_error_mgr jerr;
    cinfo.err = jpeg_std_error(&jerr);
    jpeg_create_compress(&cinfo);

    FILE *out = fopen(jpeg_out, "wb");
    if (!out) die("cannot open output");
    jpeg_stdio_dest(&cinfo, out);

    cinfo.image_width = w;
    cinfo.image_height = h;
    cinfo.input_components = ch;
    cinfo.in_color_space = (ch == 3) ? JCS_RGB : JCS_GRAYSCALE;
    jpeg_set_defaults(&cinfo);
    jpeg_set_quality(&cinfo, qf, TRUE);
    cinfo.dct_method = (J_DCT_METHOD)dct;
    for (int c = 0; c < cinfo.num_components; c++) {
        cinfo.comp_info[c].h_samp_factor = 1;
        cinfo.comp_info[c].v_samp_factor = 1;
    }

    jpeg_start_compress(&cinfo, TRUE);
    while (cinfo.next_scanline < cinfo.image_height) {
        JSAMPROW row = raw + (long)cinfo.next_scanline * w * ch;
        jpeg_write_scanlines(&cinfo, &row, 1);
    }
    jpeg_finish_compress(&cinfo);
    jpeg_destroy_compress(&cinfo);
    fclose(out);
    free(raw);
}

static void do_decompress(const char *jpeg_in, int dct, const char *raw_out)
{
    struct jpeg_decompress_struct cinfo;
    struct jpeg_error_mgr jerr;
    cinfo.err = jpeg_std_error(&jerr);
    jpeg_create_decompress(&cinfo);

    FILE *in = fopen(jpeg_in, "rb");
    if (!in) die("cannot open input");
    jpeg_stdio_src(&cinfo, in);
    jpeg_read_header(&cinfo, TRUE);
    cinfo.dct_method = (J_DCT_METHOD)dct;
    jpeg_start_decompress(&cinfo);

    int w = cinfo.output_width, h = cinfo.output_height;
    int ch = cinfo.output_components;
    unsigned char *raw = malloc((long)w * h * ch);
    while (cinfo.output_scanline < cinfo.output_height) {
        JSAMPROW row = raw + (long)cinfo.output_scanline * w * ch;
        jpeg_read_scanlines(&cinfo, &row, 1);
    }
    jpeg_finish_decompress(&cinfo);
    jpeg_destroy_decompress(&cinfo);
    fclose(in);

    FILE *out = fopen(raw_out, "wb");
    if (!out) die("cannot open output");
    fwrite(raw, 1, (long)w * h * ch, out);
    fclose(out);
    free(raw);
}

static void do_coefdump(const char *jpeg_in, const char *coef_out,
                        const char *qtbl_out)
{
    struct jpeg_decompress_struct cinfo;
    struct jpeg_error_mgr jerr;
    cinfo.err = jpeg_std_error(&jerr);
    jpeg_create_decompress(&cinfo);

    FILE *in = fopen(jpeg_in, "rb");
    if (!in) die("cannot open input");
    jpeg_stdio_src(&cinfo, in);
    jpeg_read_header(&cinfo, TRUE);
    jvirt_barray_ptr *coefs = jpeg_read_coefficients(&cinfo);

    FILE *cf = fopen(coef_out, "wb");
    FILE *qf = fopen(qtbl_out, "wb");
    if (!cf || !qf) die("cannot open output");

    for (int c = 0; c < cinfo.num_components; c++) {
        jpeg_component_info *comp = &cinfo.comp_info[c];
        int bw = comp->width_in_blocks, bh = comp->height_in_blocks;
        for (int by = 0; by < bh; by++) {
            JBLOCKARRAY rows = (cinfo.mem->access_virt_barray)
                ((j_common_ptr)&cinfo, coefs[c], by, 1, FALSE);
            for (int bx = 0; bx < bw; bx++) {
                short blk[64];
                for (int k = 0; k < 64; k++)
                    blk[k] = (short)rows[0][bx][k];
                fwrite(blk, 2, 64, cf);
            }
        }
        unsigned short qt[64];
        for (int k = 0; k < 64; k++)
            qt[k] = comp->quant_table->quantval[k];
        fwrite(qt, 2, 64, qf);
    }
    fclose(cf);
    fclose(qf);
    jpeg_finish_decompress(&cinfo);
    jpeg_destroy_decompress(&cinfo);
    fclose(in);
}

static void do_fromcoef(int w, int h, int ch, int qf,
                        const char *coef_in, const char *jpeg_out)
{
    long size;
    unsigned char *buf = read_file(coef_in, &size);
    long nblocks = (long)(w / 8) * (h / 8) * ch;
    if (size != nblocks * 64 * 2) die("coef size mismatch");
    short *coefs = (short *)buf;

    struct jpeg_compress_struct cinfo;
    struct jpeg_error_mgr jerr;
    cinfo.err = jpeg_std_error(&jerr);
    jpeg_create_compress(&cinfo);

    FILE *out = fopen(jpeg_out, "wb");
    if (!out) die("cannot open output");
    jpeg_stdio_dest(&cinfo, out);

    cinfo.image_width = w;
    cinfo.image_height = h;
    cinfo.input_components = ch;
    cinfo.in_color_space = (ch == 3) ? JCS_YCbCr : JCS_GRAYSCALE;
    jpeg_set_defaults(&cinfo);
    jpeg_set_quality(&cinfo, qf, TRUE);
    for (int c = 0; c < cinfo.num_components; c++) {
        cinfo.comp_info[c].h_samp_factor = 1;
        cinfo.comp_info[c].v_samp_factor = 1;
    }

    jvirt_barray_ptr barrays[3];
    int bw = w / 8, bh = h / 8;
    for (int c = 0; c < ch; c++) {
        barrays[c] = (cinfo.mem->request_virt_barray)
            ((j_common_ptr)&cinfo, JPOOL_IMAGE, FALSE, bw, bh, 1);
    }
    jpeg_write_coefficients(&cinfo, barrays);

    long idx = 0;
    for (int c = 0; c < ch; c++) {
        for (int by = 0; by < bh; by++) {
            JBLOCKARRAY rows = (cinfo.mem->access_virt_barray)
                ((j_common_ptr)&cinfo, barrays[c], by, 1, TRUE);
            for (int bx = 0; bx < bw; bx++) {
                for (int k = 0; k < 64; k++)
                    rows[0][bx][k] = coefs[idx * 64 + k];
                idx++;
            }
        }
    }
    jpeg_finish_compress(&cinfo);
    jpeg_destroy_compress(&cinfo);
    fclose(out);
    free(buf);
}

int main(int argc, char **argv)
{
    if (argc < 2) die("missing mode");
    if (!strcmp(argv[1], "compress") && argc == 9)
        do_compress(atoi(argv[2]), atoi(argv[3]), atoi(argv[4]),
                    atoi(argv[5]), atoi(argv[6]), argv[7], argv[8]);
    else if (!strcmp(argv[1], "decompress") && argc == 5)
        do_decompress(argv[2], atoi(argv[3]), argv[4]);
    else if (!strcmp(argv[1], "coefdump") && argc == 5)
        do_coefdump(argv[2], argv[3], argv[4]);
    else if (!strcmp(argv[1], "fromcoef") && argc == 8)
        do_fromcoef(atoi(argv[2]), atoi(argv[3]), atoi(argv[4]),
                    atoi(argv[5]), argv[6], argv[7]);
    else
        die("bad arguments");
    return 0;
}
