/** Minimal QR encoder for bag-claim payloads.
 *
 * Byte mode, error-correction level L, versions 1-5 (up to 106 payload
 * bytes), which comfortably covers every claim payload the server mints.
 * Implements the standard pipeline: bit stream, Reed-Solomon over
 * GF(256) with polynomial 0x11d, function patterns, all eight masks with
 * penalty scoring, and BCH-protected format bits.
 */

export interface QrMatrix {
  size: number;
  /** modules[y][x]; true = dark */
  modules: boolean[][];
}

// version -> [data codewords, error-correction codewords], level L,
// single ECC block
const VERSIONS: Array<[number, number]> = [
  [19, 7],
  [34, 10],
  [55, 15],
  [80, 20],
  [108, 26],
];

const ALIGNMENT_CENTER = [0, 0, 18, 22, 26, 30]; // index = version

export const MAX_PAYLOAD_BYTES = VERSIONS[VERSIONS.length - 1][0] - 2;

// -- GF(256) arithmetic -------------------------------------------------------

const GF_EXP = new Uint8Array(512);
const GF_LOG = new Uint8Array(256);
(() => {
  let x = 1;
  for (let i = 0; i < 255; i++) {
    GF_EXP[i] = x;
    GF_LOG[x] = i;
    x <<= 1;
    if (x & 0x100) x ^= 0x11d;
  }
  for (let i = 255; i < 512; i++) GF_EXP[i] = GF_EXP[i - 255];
})();

function gfMul(a: number, b: number): number {
  if (a === 0 || b === 0) return 0;
  return GF_EXP[GF_LOG[a] + GF_LOG[b]];
}

function rsGenerator(degree: number): Uint8Array {
  let poly = new Uint8Array([1]);
  for (let i = 0; i < degree; i++) {
    const next = new Uint8Array(poly.length + 1);
    const root = GF_EXP[i];
    for (let j = 0; j < poly.length; j++) {
      next[j] ^= gfMul(poly[j], root);
      next[j + 1] ^= poly[j];
    }
    poly = next;
  }
  return poly.reverse(); // highest degree first
}

function rsRemainder(data: Uint8Array, degree: number): Uint8Array {
  const generator = rsGenerator(degree);
  const remainder = new Uint8Array(degree);
  for (const byte of data) {
    const factor = byte ^ remainder[0];
    remainder.copyWithin(0, 1);
    remainder[degree - 1] = 0;
    for (let i = 0; i < degree; i++) {
      remainder[i] ^= gfMul(generator[i + 1], factor);
    }
  }
  return remainder;
}

// -- bit stream ----------------------------------------------------------------

function buildCodewords(payload: Uint8Array, version: number): Uint8Array {
  const [dataLen, ecLen] = VERSIONS[version - 1];
  const bits: number[] = [];
  const push = (value: number, count: number) => {
    for (let i = count - 1; i >= 0; i--) bits.push((value >> i) & 1);
  };
  push(0b0100, 4); // byte mode
  push(payload.length, 8); // length field (8 bits for versions 1-9)
  for (const byte of payload) push(byte, 8);
  const capacity = dataLen * 8;
  push(0, Math.min(4, capacity - bits.length)); // terminator
  while (bits.length % 8 !== 0) bits.push(0);
  const data = new Uint8Array(dataLen);
  for (let i = 0; i < bits.length; i += 8) {
    let byte = 0;
    for (let j = 0; j < 8; j++) byte = (byte << 1) | bits[i + j];
    data[i / 8] = byte;
  }
  const pads = [0xec, 0x11];
  for (let i = bits.length / 8, p = 0; i < dataLen; i++, p++) {
    data[i] = pads[p % 2];
  }
  const out = new Uint8Array(dataLen + ecLen);
  out.set(data);
  out.set(rsRemainder(data, ecLen), dataLen);
  return out;
}

// -- matrix construction ---------------------------------------------------------

class Builder {
  size: number;
  modules: boolean[][];
  isFunction: boolean[][];

  constructor(readonly version: number) {
    this.size = 17 + version * 4;
    this.modules = Array.from({ length: this.size }, () =>
      new Array<boolean>(this.size).fill(false),
    );
    this.isFunction = Array.from({ length: this.size }, () =>
      new Array<boolean>(this.size).fill(false),
    );
  }

  set(y: number, x: number, dark: boolean): void {
    this.modules[y][x] = dark;
    this.isFunction[y][x] = true;
  }

  drawFinder(cy: number, cx: number): void {
    for (let dy = -4; dy <= 4; dy++) {
      for (let dx = -4; dx <= 4; dx++) {
        const y = cy + dy;
        const x = cx + dx;
        if (y < 0 || y >= this.size || x < 0 || x >= this.size) continue;
        const dist = Math.max(Math.abs(dy), Math.abs(dx));
        this.set(y, x, dist !== 2 && dist !== 4);
      }
    }
  }

  drawAlignment(cy: number, cx: number): void {
    for (let dy = -2; dy <= 2; dy++) {
      for (let dx = -2; dx <= 2; dx++) {
        const dist = Math.max(Math.abs(dy), Math.abs(dx));
        this.set(cy + dy, cx + dx, dist !== 1);
      }
    }
  }

  drawFunctionPatterns(): void {
    for (let i = 0; i < this.size; i++) {
      // timing pattern; finder/format cells get overwritten below
      this.set(6, i, i % 2 === 0);
      this.set(i, 6, i % 2 === 0);
    }
    this.drawFinder(3, 3);
    this.drawFinder(3, this.size - 4);
    this.drawFinder(this.size - 4, 3);
    const center = ALIGNMENT_CENTER[this.version];
    if (center) {
      const coords = [6, center];
      for (const cy of coords) {
        for (const cx of coords) {
          const inFinder =
            (cy === 6 && cx === 6) ||
            (cy === 6 && cx === center && center === this.size - 7) ||
            (cy === center && cx === 6 && center === this.size - 7);
          if (cy === 6 && cx === 6) continue;
          if (inFinder) continue;
          if (cy === 6 || cx === 6) {
            // versions 2-5 only carry the single lower-right pattern
            continue;
          }
          this.drawAlignment(cy, cx);
        }
      }
    }
    // reserve both format-information strips (rewritten per mask later)
    this.drawFormatBits(0);
  }

  drawFormatBits(mask: number): void {
    const data = (0b01 << 3) | mask; // level L
    let rem = data;
    for (let i = 0; i < 10; i++) {
      rem = (rem << 1) ^ ((rem >> 9) * 0x537);
    }
    const bits = ((data << 10) | rem) ^ 0x5412;
    const bit = (i: number) => ((bits >> i) & 1) !== 0;
    // first copy, around the top-left finder
    for (let i = 0; i <= 5; i++) this.set(i, 8, bit(i));
    this.set(7, 8, bit(6));
    this.set(8, 8, bit(7));
    this.set(8, 7, bit(8));
    for (let i = 9; i <= 14; i++) this.set(8, 14 - i, bit(i));
    // second copy, split between the other two finders
    for (let i = 0; i <= 7; i++) this.set(8, this.size - 1 - i, bit(i));
    for (let i = 8; i <= 14; i++) this.set(this.size - 15 + i, 8, bit(i));
    this.set(this.size - 8, 8, true); // dark module
  }

  placeData(codewords: Uint8Array): void {
    let bitIndex = 0;
    const total = codewords.length * 8;
    for (let right = this.size - 1; right >= 1; right -= 2) {
      if (right === 6) right = 5;
      for (let vert = 0; vert < this.size; vert++) {
        for (let j = 0; j < 2; j++) {
          const x = right - j;
          const upward = ((right + 1) & 2) === 0;
          const y = upward ? this.size - 1 - vert : vert;
          if (this.isFunction[y][x] || bitIndex >= total) continue;
          this.modules[y][x] =
            ((codewords[bitIndex >> 3] >> (7 - (bitIndex & 7))) & 1) !== 0;
          bitIndex++;
        }
      }
    }
  }

  applyMask(mask: number): void {
    for (let y = 0; y < this.size; y++) {
      for (let x = 0; x < this.size; x++) {
        if (this.isFunction[y][x]) continue;
        let invert: boolean;
        switch (mask) {
          case 0:
            invert = (x + y) % 2 === 0;
            break;
          case 1:
            invert = y % 2 === 0;
            break;
          case 2:
            invert = x % 3 === 0;
            break;
          case 3:
            invert = (x + y) % 3 === 0;
            break;
          case 4:
            invert = (Math.floor(y / 2) + Math.floor(x / 3)) % 2 === 0;
            break;
          case 5:
            invert = ((x * y) % 2) + ((x * y) % 3) === 0;
            break;
          case 6:
            invert = (((x * y) % 2) + ((x * y) % 3)) % 2 === 0;
            break;
          default:
            invert = (((x + y) % 2) + ((x * y) % 3)) % 2 === 0;
        }
        if (invert) this.modules[y][x] = !this.modules[y][x];
      }
    }
  }

  penalty(): number {
    const m = this.modules;
    const n = this.size;
    let score = 0;
    // adjacent runs of 5+ in rows and columns
    for (let y = 0; y < n; y++) {
      for (const get of [
        (i: number) => m[y][i],
        (i: number) => m[i][y],
      ]) {
        let run = 1;
        for (let x = 1; x <= n; x++) {
          if (x < n && get(x) === get(x - 1)) {
            run++;
          } else {
            if (run >= 5) score += 3 + (run - 5);
            run = 1;
          }
        }
      }
    }
    // 2x2 blocks
    for (let y = 0; y < n - 1; y++) {
      for (let x = 0; x < n - 1; x++) {
        const c = m[y][x];
        if (c === m[y][x + 1] && c === m[y + 1][x] && c === m[y + 1][x + 1]) {
          score += 3;
        }
      }
    }
    // finder-like 1:1:3:1:1 runs with a 4-module light flank
    const checkLine = (get: (i: number) => boolean) => {
      const line: boolean[] = [];
      for (let i = 0; i < n; i++) line.push(get(i));
      const core = [true, false, true, true, true, false, true];
      for (let i = 0; i + 7 <= n; i++) {
        let match = true;
        for (let j = 0; j < 7; j++) {
          if (line[i + j] !== core[j]) {
            match = false;
            break;
          }
        }
        if (!match) continue;
        const lightBefore =
          i >= 4 && line.slice(i - 4, i).every((v) => !v);
        const lightAfter =
          i + 11 <= n && line.slice(i + 7, i + 11).every((v) => !v);
        if (lightBefore || lightAfter) score += 40;
      }
    };
    for (let y = 0; y < n; y++) checkLine((i) => m[y][i]);
    for (let x = 0; x < n; x++) checkLine((i) => m[i][x]);
    // dark/light balance
    let dark = 0;
    for (const row of m) for (const cell of row) if (cell) dark++;
    const totalCells = n * n;
    const k = Math.ceil(Math.abs(dark * 20 - totalCells * 10) / totalCells);
    score += k * 10;
    return score;
  }
}

/** Encode arbitrary text (UTF-8) into a QR module matrix. */
export function encodeQr(text: string): QrMatrix {
  const payload = new TextEncoder().encode(text);
  let version = 0;
  for (let v = 1; v <= VERSIONS.length; v++) {
    if (payload.length <= VERSIONS[v - 1][0] - 2) {
      version = v;
      break;
    }
  }
  if (version === 0) {
    throw new Error(
      `payload of ${payload.length} bytes exceeds ${MAX_PAYLOAD_BYTES}`,
    );
  }
  const codewords = buildCodewords(payload, version);
  const builder = new Builder(version);
  builder.drawFunctionPatterns();
  builder.placeData(codewords);

  let bestMask = 0;
  let bestScore = Infinity;
  for (let mask = 0; mask < 8; mask++) {
    builder.applyMask(mask);
    builder.drawFormatBits(mask);
    const score = builder.penalty();
    if (score < bestScore) {
      bestScore = score;
      bestMask = mask;
    }
    builder.applyMask(mask); // undo (mask application is an involution)
  }
  builder.applyMask(bestMask);
  builder.drawFormatBits(bestMask);
  return { size: builder.size, modules: builder.modules };
}

/** Render a matrix as a crisp inline SVG. */
export function qrToSvg(matrix: QrMatrix, moduleSize = 4, margin = 4): string {
  const dimension = (matrix.size + margin * 2) * moduleSize;
  const rects: string[] = [];
  for (let y = 0; y < matrix.size; y++) {
    for (let x = 0; x < matrix.size; x++) {
      if (!matrix.modules[y][x]) continue;
      rects.push(
        `<rect x="${(x + margin) * moduleSize}" y="${(y + margin) * moduleSize}" ` +
          `width="${moduleSize}" height="${moduleSize}"/>`,
      );
    }
  }
  return (
    `<svg xmlns="http://www.w3.org/2000/svg" width="${dimension}" ` +
    `height="${dimension}" viewBox="0 0 ${dimension} ${dimension}">` +
    `<rect width="100%" height="100%" fill="#fff"/>` +
    `<g fill="#111">${rects.join("")}</g></svg>`
  );
}
