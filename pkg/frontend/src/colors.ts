/** Stable per-node colors so a chip is recognizably "from S1" everywhere. */

function fnv1a(text: string): number {
  let h = 0x811c9dc5;
  for (let i = 0; i < text.length; i++) {
    h ^= text.charCodeAt(i);
    h = Math.imul(h, 0x01000193) >>> 0;
  }
  return h;
}

export function nodeColor(name: string): string {
  // golden-angle spacing keeps small clusters of names visually apart
  const hue = (fnv1a(name) * 137.508) % 360;
  return `hsl(${hue.toFixed(1)}, 62%, 38%)`;
}
