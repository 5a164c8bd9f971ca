/** Tile text codes and display helpers.
 *
 * A tile code is a category letter plus a rank digit: W characters, B dots,
 * T bamboo, F winds, J dragons, H flowers.  Copies of the same kind carry a
 * ".copy" suffix ("W5.2") wherever provenance matters; display always uses
 * the bare kind code plus a unicode glyph.
 */

const CATEGORY_BASE: Record<string, number> = { W: 0, B: 9, T: 18, F: 27, J: 31, H: 34 };
const CATEGORY_LIMIT: Record<string, number> = { W: 9, B: 9, T: 9, F: 4, J: 3, H: 8 };
const GLYPH_BASE: Record<string, number> = {
  W: 0x1f007, // characters 1-9
  B: 0x1f019, // dots 1-9
  T: 0x1f010, // bamboo 1-9
  F: 0x1f000, // winds E S W N
  J: 0x1f004, // dragons red green white
  H: 0x1f022, // flowers
};

/** "W5.2" -> "W5"; bare kind codes pass through. */
export function kindOf(code: string): string {
  const dot = code.indexOf(".");
  return dot === -1 ? code : code.slice(0, dot);
}

/** Copy suffix as a number, -1 when absent. */
export function copyOf(code: string): number {
  const dot = code.indexOf(".");
  return dot === -1 ? -1 : Number(code.slice(dot + 1));
}

/** Kind index 0..33 (flowers 34..41); throws on malformed codes. */
export function kindIndex(code: string): number {
  const kind = kindOf(code);
  const base = CATEGORY_BASE[kind[0]];
  const rank = Number(kind.slice(1));
  if (
    base === undefined ||
    !Number.isInteger(rank) ||
    rank < 1 ||
    rank > CATEGORY_LIMIT[kind[0]]
  ) {
    throw new Error(`bad tile code ${JSON.stringify(code)}`);
  }
  return base + rank - 1;
}

export function compareTiles(a: string, b: string): number {
  const ka = kindIndex(a);
  const kb = kindIndex(b);
  if (ka !== kb) return ka - kb;
  return copyOf(a) - copyOf(b);
}

/** Sorted copy, suits first then winds and dragons, ties by copy number. */
export function sortTiles(codes: readonly string[]): string[] {
  return [...codes].sort(compareTiles);
}

export function tileGlyph(code: string): string {
  const kind = kindOf(code);
  const base = GLYPH_BASE[kind[0]];
  kindIndex(code); // validate
  return String.fromCodePoint(base + Number(kind.slice(1)) - 1);
}

/** Glyph plus text code, e.g. "🀋 W5". */
export function tileLabel(code: string): string {
  return `${tileGlyph(code)} ${kindOf(code)}`;
}
