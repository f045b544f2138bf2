// Sector ring geometry for the SVG view. Sectors are 1-based and sector s
// spans [(s-1)*w, s*w) counterclockwise from +x, matching the simulator;
// SVG's y axis points down, so screen y = cy - r*sin(theta).

export interface RingLayout {
  cx: number;
  cy: number;
  rOuter: number;
  rInner: number;
  /** World meters mapped onto rOuter (the relay's flight circle). */
  worldRadius: number;
}

export const DEFAULT_RING: RingLayout = {
  cx: 200,
  cy: 200,
  rOuter: 180,
  rInner: 60,
  worldRadius: 150,
};

export function sectorSpan(sector: number, sectors: number): { lo: number; hi: number } {
  const w = (2 * Math.PI) / sectors;
  const lo = (sector - 1) * w;
  return { lo, hi: lo + w };
}

export function toScreen(layout: RingLayout, r: number, theta: number): { x: number; y: number } {
  return {
    x: layout.cx + r * Math.cos(theta),
    y: layout.cy - r * Math.sin(theta),
  };
}

/** SVG path of one annular wedge, outer arc then inner arc back. */
export function sectorPath(layout: RingLayout, sector: number, sectors: number): string {
  const { lo, hi } = sectorSpan(sector, sectors);
  const a = toScreen(layout, layout.rOuter, lo);
  const b = toScreen(layout, layout.rOuter, hi);
  const c = toScreen(layout, layout.rInner, hi);
  const d = toScreen(layout, layout.rInner, lo);
  const large = hi - lo > Math.PI ? 1 : 0;
  // sweep=0 on the outer arc: increasing theta is counterclockwise on
  // screen once y is flipped
  return [
    `M ${fmt(a.x)} ${fmt(a.y)}`,
    `A ${fmt(layout.rOuter)} ${fmt(layout.rOuter)} 0 ${large} 0 ${fmt(b.x)} ${fmt(b.y)}`,
    `L ${fmt(c.x)} ${fmt(c.y)}`,
    `A ${fmt(layout.rInner)} ${fmt(layout.rInner)} 0 ${large} 1 ${fmt(d.x)} ${fmt(d.y)}`,
    'Z',
  ].join(' ');
}

/** Marker point for a sector-dwelling object (the relay), mid-wedge. */
export function sectorMarker(layout: RingLayout, sector: number, sectors: number): { x: number; y: number } {
  const { lo, hi } = sectorSpan(sector, sectors);
  const rMid = (layout.rOuter + layout.rInner) / 2;
  return toScreen(layout, rMid, (lo + hi) / 2);
}

/** Map a world-space UE position (meters) into the ring view. */
export function positionMarker(layout: RingLayout, pos: [number, number]): { x: number; y: number } {
  const [wx, wy] = pos;
  const r = Math.hypot(wx, wy);
  const scale = layout.rOuter / layout.worldRadius;
  const rScreen = Math.min(r * scale, layout.rOuter);
  const theta = Math.atan2(wy, wx);
  return toScreen(layout, rScreen, theta);
}

function fmt(v: number): string {
  return (Math.round(v * 100) / 100).toString();
}
