"""File I/O: baseline JPEG bitstreams, PNG rasters, mask images.

The JPEG side handles exactly the profile the analysis needs: baseline
sequential DCT, Huffman entropy coding, 8-bit samples, no chroma
subsampling.  Anything else (progressive, arithmetic coding, subsampled or
12-bit files) raises :class:`UnsupportedFormat` naming the offending
marker.  Parsing recovers the quantized coefficients and quantization
tables exactly; the encoder writes standard Annex-K Huffman tables so that
any decoder can read its output.

Rasters travel as PNG via Pillow; block masks are written upsampled x8 with
a fixed palette (authentic steel blue, incompatible red, unsolved pink).
"""

from __future__ import annotations

import io
import struct
from dataclasses import dataclass

import numpy as np
from PIL import Image

from .forensics import ImagePlane, Mask
from .pipeline import PIXEL_DOMAIN
from .search import Verdict


class UnsupportedFormat(Exception):
    pass


class ParseError(Exception):
    pass


ZIGZAG = np.array([
    0, 1, 8, 16, 9, 2, 3, 10, 17, 24, 32, 25, 18, 11, 4, 5,
    12, 19, 26, 33, 40, 48, 41, 34, 27, 20, 13, 6, 7, 14, 21, 28,
    35, 42, 49, 56, 57, 50, 43, 36, 29, 22, 15, 23, 30, 37, 44, 51,
    58, 59, 52, 45, 38, 31, 39, 46, 53, 60, 61, 54, 47, 55, 62, 63])

# standard Huffman table specs (BITS, HUFFVAL)
_DC_LUMA_BITS = [0, 1, 5, 1, 1, 1, 1, 1, 1, 0, 0, 0, 0, 0, 0, 0]
_DC_LUMA_VALS = list(range(12))
_DC_CHROMA_BITS = [0, 3, 1, 1, 1, 1, 1, 1, 1, 1, 1, 0, 0, 0, 0, 0]
_DC_CHROMA_VALS = list(range(12))
_AC_LUMA_BITS = [0, 2, 1, 3, 3, 2, 4, 3, 5, 5, 4, 4, 0, 0, 1, 0x7d]
_AC_LUMA_VALS = [
    0x01, 0x02, 0x03, 0x00, 0x04, 0x11, 0x05, 0x12, 0x21, 0x31, 0x41, 0x06,
    0x13, 0x51, 0x61, 0x07, 0x22, 0x71, 0x14, 0x32, 0x81, 0x91, 0xa1, 0x08,
    0x23, 0x42, 0xb1, 0xc1, 0x15, 0x52, 0xd1, 0xf0, 0x24, 0x33, 0x62, 0x72,
    0x82, 0x09, 0x0a, 0x16, 0x17, 0x18, 0x19, 0x1a, 0x25, 0x26, 0x27, 0x28,
    0x29, 0x2a, 0x34, 0x35, 0x36, 0x37, 0x38, 0x39, 0x3a, 0x43, 0x44, 0x45,
    0x46, 0x47, 0x48, 0x49, 0x4a, 0x53, 0x54, 0x55, 0x56, 0x57, 0x58, 0x59,
    0x5a, 0x63, 0x64, 0x65, 0x66, 0x67, 0x68, 0x69, 0x6a, 0x73, 0x74, 0x75,
    0x76, 0x77, 0x78, 0x79, 0x7a, 0x83, 0x84, 0x85, 0x86, 0x87, 0x88, 0x89,
    0x8a, 0x92, 0x93, 0x94, 0x95, 0x96, 0x97, 0x98, 0x99, 0x9a, 0xa2, 0xa3,
    0xa4, 0xa5, 0xa6, 0xa7, 0xa8, 0xa9, 0xaa, 0xb2, 0xb3, 0xb4, 0xb5, 0xb6,
    0xb7, 0xb8, 0xb9, 0xba, 0xc2, 0xc3, 0xc4, 0xc5, 0xc6, 0xc7, 0xc8, 0xc9,
    0xca, 0xd2, 0xd3, 0xd4, 0xd5, 0xd6, 0xd7, 0xd8, 0xd9, 0xda, 0xe1, 0xe2,
    0xe3, 0xe4, 0xe5, 0xe6, 0xe7, 0xe8, 0xe9, 0xea, 0xf1, 0xf2, 0xf3, 0xf4,
    0xf5, 0xf6, 0xf7, 0xf8, 0xf9, 0xfa]
_AC_CHROMA_BITS = [0, 2, 1, 2, 4, 4, 3, 4, 7, 5, 4, 4, 0, 1, 2, 0x77]
_AC_CHROMA_VALS = [
    0x00, 0x01, 0x02, 0x03, 0x11, 0x04, 0x05, 0x21, 0x31, 0x06, 0x12, 0x41,
    0x51, 0x07, 0x61, 0x71, 0x13, 0x22, 0x32, 0x81, 0x08, 0x14, 0x42, 0x91,
    0xa1, 0xb1, 0xc1, 0x09, 0x23, 0x33, 0x52, 0xf0, 0x15, 0x62, 0x72, 0xd1,
    0x0a, 0x16, 0x24, 0x34, 0xe1, 0x25, 0xf1, 0x17, 0x18, 0x19, 0x1a, 0x26,
    0x27, 0x28, 0x29, 0x2a, 0x35, 0x36, 0x37, 0x38, 0x39, 0x3a, 0x43, 0x44,
    0x45, 0x46, 0x47, 0x48, 0x49, 0x4a, 0x53, 0x54, 0x55, 0x56, 0x57, 0x58,
    0x59, 0x5a, 0x63, 0x64, 0x65, 0x66, 0x67, 0x68, 0x69, 0x6a, 0x73, 0x74,
    0x75, 0x76, 0x77, 0x78, 0x79, 0x7a, 0x82, 0x83, 0x84, 0x85, 0x86, 0x87,
    0x88, 0x89, 0x8a, 0x92, 0x93, 0x94, 0x95, 0x96, 0x97, 0x98, 0x99, 0x9a,
    0xa2, 0xa3, 0xa4, 0xa5, 0xa6, 0xa7, 0xa8, 0xa9, 0xaa, 0xb2, 0xb3, 0xb4,
    0xb5, 0xb6, 0xb7, 0xb8, 0xb9, 0xba, 0xc2, 0xc3, 0xc4, 0xc5, 0xc6, 0xc7,
    0xc8, 0xc9, 0xca, 0xd2, 0xd3, 0xd4, 0xd5, 0xd6, 0xd7, 0xd8, 0xd9, 0xda,
    0xe2, 0xe3, 0xe4, 0xe5, 0xe6, 0xe7, 0xe8, 0xe9, 0xea, 0xf2, 0xf3, 0xf4,
    0xf5, 0xf6, 0xf7, 0xf8, 0xf9, 0xfa]


def _canonical_codes(bits, vals):
    """(BITS, HUFFVAL) -> {symbol: (code, length)} per the standard."""
    codes = {}
    code = 0
    k = 0
    for length in range(1, 17):
        for _ in range(bits[length - 1]):
            codes[vals[k]] = (code, length)
            code += 1
            k += 1
        code <<= 1
    return codes


def _decode_map(bits, vals):
    """(BITS, HUFFVAL) -> {(length, code): symbol}."""
    return {(l, c): s for s, (c, l) in _canonical_codes(bits, vals).items()}


@dataclass
class JpegFileModel:
    width: int
    height: int
    channels: int
    tables: np.ndarray          # (c, 8, 8) natural order
    coefs: np.ndarray           # (c, grid_h, grid_w, 8, 8) quantized
    markers: tuple


class _BitReader:
    """MSB-first reader over destuffed entropy-coded bytes."""

    def __init__(self, data):
        self.data = data
        self.pos = 0
        self.bit = 0

    def read_bit(self):
        if self.pos >= len(self.data):
            raise ParseError("entropy-coded segment exhausted")
        b = (self.data[self.pos] >> (7 - self.bit)) & 1
        self.bit += 1
        if self.bit == 8:
            self.bit = 0
            self.pos += 1
        return b

    def receive(self, n):
        v = 0
        for _ in range(n):
            v = (v << 1) | self.read_bit()
        return v


def _extend(v, n):
    # sign-extend a JPEG magnitude code
    if n == 0:
        return 0
    if v < (1 << (n - 1)):
        return v - (1 << n) + 1
    return v


def _read_huffman(reader, table):
    code = 0
    for length in range(1, 17):
        code = (code << 1) | reader.read_bit()
        sym = table.get((length, code))
        if sym is not None:
            return sym
    raise ParseError("invalid Huffman code")


def parse_jpeg(data: bytes) -> JpegFileModel:
    """Decode a baseline 4:4:4 Huffman JPEG down to quantized coefficients."""
    if len(data) < 4 or data[0:2] != b"\xff\xd8":
        raise ParseError("missing SOI marker")
    pos = 2
    qtables = {}
    htables = {}
    frame = None
    restart_interval = 0
    markers = []
    scan = None

    while pos < len(data):
        if data[pos] != 0xFF:
            raise ParseError(f"expected marker at offset {pos}")
        marker = data[pos + 1]
        pos += 2
        if marker == 0xD9:  # EOI
            markers.append("EOI")
            break
        if marker in (0xC1,):
            raise UnsupportedFormat("SOF1 extended sequential not supported")
        if marker in (0xC2, 0xC6, 0xCA, 0xCE):
            raise UnsupportedFormat("SOF2 progressive not supported")
        if marker in (0xC3, 0xC5, 0xC7, 0xCB, 0xCD, 0xCF):
            raise UnsupportedFormat(f"SOF{marker - 0xC0} not supported")
        if marker in (0xC9,):
            raise UnsupportedFormat("SOF9 arithmetic coding not supported")
        if marker == 0xCC:
            raise UnsupportedFormat("DAC arithmetic coding not supported")
        (length,) = struct.unpack(">H", data[pos:pos + 2])
        seg = data[pos + 2:pos + length]
        if len(seg) != length - 2:
            raise ParseError("truncated segment")

        if marker == 0xDB:  # DQT
            markers.append("DQT")
            i = 0
            while i < len(seg):
                pq, tq = seg[i] >> 4, seg[i] & 15
                i += 1
                if pq != 0:
                    raise UnsupportedFormat("DQT with 16-bit precision "
                                            "not supported")
                tbl = np.zeros(64, dtype=np.int64)
                tbl[ZIGZAG] = np.frombuffer(seg[i:i + 64], dtype=np.uint8)
                qtables[tq] = tbl.reshape(8, 8)
                i += 64
        elif marker == 0xC4:  # DHT
            markers.append("DHT")
            i = 0
            while i < len(seg):
                tc, th = seg[i] >> 4, seg[i] & 15
                bits = list(seg[i + 1:i + 17])
                n = sum(bits)
                vals = list(seg[i + 17:i + 17 + n])
                htables[(tc, th)] = _decode_map(bits, vals)
                i += 17 + n
        elif marker == 0xC0:  # SOF0
            markers.append("SOF0")
            precision = seg[0]
            if precision != 8:
                raise UnsupportedFormat(f"SOF0 with {precision}-bit samples "
                                        "not supported")
            h, w = struct.unpack(">HH", seg[1:5])
            nc = seg[5]
            comps = []
            for ci in range(nc):
                cid, samp, tq = seg[6 + 3 * ci:9 + 3 * ci]
                if samp != 0x11:
                    raise UnsupportedFormat("SOF0 with chroma subsampling "
                                            "not supported")
                comps.append({"id": cid, "tq": tq})
            frame = {"w": w, "h": h, "comps": comps}
        elif marker == 0xDD:  # DRI
            markers.append("DRI")
            (restart_interval,) = struct.unpack(">H", seg[:2])
        elif marker == 0xDA:  # SOS
            markers.append("SOS")
            ns = seg[0]
            sel = []
            for ci in range(ns):
                cs, tt = seg[1 + 2 * ci:3 + 2 * ci]
                sel.append({"cs": cs, "dc": tt >> 4, "ac": tt & 15})
            scan = (sel, pos + length)
            pos += length
            break
        else:
            markers.append(f"APP{marker - 0xE0}" if 0xE0 <= marker <= 0xEF
                           else f"0xFF{marker:02X}")
        pos += length

    if frame is None or scan is None:
        raise ParseError("missing SOF0 or SOS")
    sel, pos = scan
    w, h = frame["w"], frame["h"]
    if w % 8 or h % 8:
        raise UnsupportedFormat("frame dimensions must be multiples of 8")
    nc = len(frame["comps"])
    gw, gh = w // 8, h // 8
    coefs = np.zeros((nc, gh, gw, 8, 8), dtype=np.int64)

    # split the entropy-coded data into restart segments and destuff
    segments = []
    cur = bytearray()
    end = len(data)
    i = pos
    while i < end:
        b = data[i]
        if b == 0xFF:
            nxt = data[i + 1] if i + 1 < end else 0xD9
            if nxt == 0x00:
                cur.append(0xFF)
                i += 2
                continue
            if 0xD0 <= nxt <= 0xD7:
                segments.append(bytes(cur))
                cur = bytearray()
                i += 2
                continue
            break
        cur.append(b)
        i += 1
    segments.append(bytes(cur))

    dc_pred = [0] * nc
    mcu = 0
    total_mcus = gw * gh
    seg_iter = iter(segments)
    reader = _BitReader(next(seg_iter))
    while mcu < total_mcus:
        if restart_interval and mcu and mcu % restart_interval == 0:
            reader = _BitReader(next(seg_iter, b""))
            dc_pred = [0] * nc
        by, bx = divmod(mcu, gw)
        for ci, s in enumerate(sel):
            dc_tab = htables.get((0, s["dc"]))
            ac_tab = htables.get((1, s["ac"]))
            if dc_tab is None or ac_tab is None:
                raise ParseError("scan references undefined Huffman table")
            block = np.zeros(64, dtype=np.int64)
            t = _read_huffman(reader, dc_tab)
            diff = _extend(reader.receive(t), t)
            dc_pred[ci] += diff
            block[0] = dc_pred[ci]
            k = 1
            while k < 64:
                rs = _read_huffman(reader, ac_tab)
                r, size = rs >> 4, rs & 15
                if size == 0:
                    if r == 15:
                        k += 16
                        continue
                    break  # EOB
                k += r
                if k > 63:
                    raise ParseError("AC run overflows block")
                block[k] = _extend(reader.receive(size), size)
                k += 1
            nat = np.zeros(64, dtype=np.int64)
            nat[ZIGZAG] = block
            coefs[ci, by, bx] = nat.reshape(8, 8)
        mcu += 1

    tables = np.stack([qtables[c["tq"]] for c in frame["comps"]])
    return JpegFileModel(width=w, height=h, channels=nc, tables=tables,
                         coefs=coefs, markers=tuple(markers))


class _BitWriter:
    def __init__(self):
        self.out = bytearray()
        self.acc = 0
        self.nbits = 0

    def write(self, code, length):
        self.acc = (self.acc << length) | code
        self.nbits += length
        while self.nbits >= 8:
            self.nbits -= 8
            byte = (self.acc >> self.nbits) & 0xFF
            self.out.append(byte)
            if byte == 0xFF:
                self.out.append(0x00)

    def flush(self):
        if self.nbits:
            pad = 8 - self.nbits
            self.write((1 << pad) - 1, pad)


def _magnitude(v):
    # (category, code bits) of a DC diff / AC level
    if v == 0:
        return 0, 0
    a = abs(v)
    n = a.bit_length()
    code = v if v > 0 else v + (1 << n) - 1
    return n, code


def encode_jpeg(coefs, tables) -> bytes:
    """Quantized coefficients (c, gh, gw, 8, 8) -> baseline JPEG bytes."""
    coefs = np.asarray(coefs, dtype=np.int64)
    tables = np.asarray(tables, dtype=np.int64)
    nc, gh, gw = coefs.shape[:3]
    if nc not in (1, 3):
        raise ValueError("1 or 3 components required")
    h, w = gh * 8, gw * 8
    out = io.BytesIO()
    out.write(b"\xff\xd8")

    def seg(marker, payload):
        out.write(bytes([0xFF, marker]))
        out.write(struct.pack(">H", len(payload) + 2))
        out.write(payload)

    # DQT: table 0 (luma) and, for color, table 1 (chroma)
    n_tables = 1 if nc == 1 else 2
    for t in range(n_tables):
        zz = tables[t].reshape(64)[ZIGZAG]
        seg(0xDB, bytes([t]) + bytes(int(v) for v in zz))

    comp_bytes = b""
    for ci in range(nc):
        tq = 0 if ci == 0 else 1
        comp_bytes += bytes([ci + 1, 0x11, tq])
    seg(0xC0, struct.pack(">BHH", 8, h, w) + bytes([nc]) + comp_bytes)

    specs = [(0x00, _DC_LUMA_BITS, _DC_LUMA_VALS),
             (0x10, _AC_LUMA_BITS, _AC_LUMA_VALS)]
    if nc == 3:
        specs += [(0x01, _DC_CHROMA_BITS, _DC_CHROMA_VALS),
                  (0x11, _AC_CHROMA_BITS, _AC_CHROMA_VALS)]
    for tid, bits, vals in specs:
        seg(0xC4, bytes([tid]) + bytes(bits) + bytes(vals))

    sos = bytes([nc])
    for ci in range(nc):
        tt = 0x00 if ci == 0 else 0x11
        sos += bytes([ci + 1, tt])
    sos += bytes([0, 63, 0])
    seg(0xDA, sos)

    dc_codes = [_canonical_codes(_DC_LUMA_BITS, _DC_LUMA_VALS),
                _canonical_codes(_DC_CHROMA_BITS, _DC_CHROMA_VALS)]
    ac_codes = [_canonical_codes(_AC_LUMA_BITS, _AC_LUMA_VALS),
                _canonical_codes(_AC_CHROMA_BITS, _AC_CHROMA_VALS)]

    writer = _BitWriter()
    dc_pred = [0] * nc
    for by in range(gh):
        for bx in range(gw):
            for ci in range(nc):
                tsel = 0 if ci == 0 else 1
                zz = coefs[ci, by, bx].reshape(64)[ZIGZAG]
                diff = int(zz[0]) - dc_pred[ci]
                dc_pred[ci] = int(zz[0])
                n, code = _magnitude(diff)
                c, l = dc_codes[tsel][n]
                writer.write(c, l)
                if n:
                    writer.write(code, n)
                run = 0
                for k in range(1, 64):
                    v = int(zz[k])
                    if v == 0:
                        run += 1
                        continue
                    while run > 15:
                        c, l = ac_codes[tsel][0xF0]
                        writer.write(c, l)
                        run -= 16
                    n, code = _magnitude(v)
                    c, l = ac_codes[tsel][(run << 4) | n]
                    writer.write(c, l)
                    writer.write(code, n)
                    run = 0
                if run:
                    c, l = ac_codes[tsel][0x00]
                    writer.write(c, l)
    writer.flush()
    out.write(bytes(writer.out))
    out.write(b"\xff\xd9")
    return out.getvalue()


def read_raster(path) -> ImagePlane:
    """Load an 8-bit grayscale or RGB raster as a pixel ImagePlane."""
    img = Image.open(path)
    if img.mode not in ("L", "RGB"):
        raise UnsupportedFormat(f"raster mode {img.mode!r} not supported "
                                "(8-bit L or RGB only)")
    arr = np.asarray(img, dtype=np.int64)
    if arr.ndim == 2:
        arr = arr[None]
    else:
        arr = arr.transpose(2, 0, 1)
    return ImagePlane(arr, PIXEL_DOMAIN)


def write_raster(img: ImagePlane, path):
    """Store a pixel ImagePlane losslessly as PNG."""
    if img.origin != PIXEL_DOMAIN:
        raise ValueError("only pixel images can be written as rasters")
    s = img.samples.astype(np.uint8)
    if s.shape[0] == 1:
        Image.fromarray(s[0], "L").save(path, "PNG")
    else:
        Image.fromarray(s.transpose(1, 2, 0), "RGB").save(path, "PNG")


MASK_PALETTE = {
    Verdict.COMPATIBLE: (70, 130, 180),     # steel blue: authentic
    Verdict.INCOMPATIBLE: (220, 20, 60),    # red: manipulated
    Verdict.UNSOLVED: (255, 182, 193),      # pink: undecided
}


def write_mask(mask: Mask, path, scale: int = 8):
    """Write a tri-state mask as an upsampled color PNG."""
    gh, gw = mask.tristate.shape
    rgb = np.zeros((gh, gw, 3), dtype=np.uint8)
    for verdict, c in MASK_PALETTE.items():
        rgb[mask.tristate == verdict] = c
    rgb = np.kron(rgb, np.ones((scale, scale, 1), dtype=np.uint8))
    Image.fromarray(rgb, "RGB").save(path, "PNG")


def write_binary_mask(mask: Mask, path, scale: int = 8):
    """Binary manipulated/authentic mask as a black-and-white PNG."""
    bw = np.where(mask.manipulated, 255, 0).astype(np.uint8)
    bw = np.kron(bw, np.ones((scale, scale), dtype=np.uint8))
    Image.fromarray(bw, "L").save(path, "PNG")
