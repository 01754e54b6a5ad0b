import { mulberry32, seedFrom } from "../prng";

export interface Point {
  x: number;
  y: number;
}

export interface ForceOptions {
  width: number;
  height: number;
  iterations: number;
  seed: string;
}

const DEFAULTS: ForceOptions = {
  width: 900,
  height: 560,
  iterations: 300,
  seed: "argument-graph",
};

/**
 * Deterministic force-directed layout: node repulsion, edge springs, and a
 * gentle pull to the canvas center. Purely presentational; the node and
 * edge sets come straight from the service's framework payload.
 */
export function forceLayout(
  nodeIds: string[],
  edges: { from: string; to: string }[],
  options: Partial<ForceOptions> = {},
): Map<string, Point> {
  const { width, height, iterations, seed } = { ...DEFAULTS, ...options };
  const positions = new Map<string, Point>();
  if (nodeIds.length === 0) return positions;

  const rand = mulberry32(seedFrom(seed));
  const margin = 40;
  for (const id of nodeIds) {
    positions.set(id, {
      x: margin + rand() * (width - 2 * margin),
      y: margin + rand() * (height - 2 * margin),
    });
  }

  const index = new Map(nodeIds.map((id, i) => [id, i]));
  const springs = edges
    .filter((e) => index.has(e.from) && index.has(e.to) && e.from !== e.to)
    .map((e) => [e.from, e.to] as const);

  const area = width * height;
  const ideal = Math.sqrt(area / nodeIds.length) * 0.85;
  let temperature = width / 8;
  const cooling = temperature / (iterations + 1);

  for (let step = 0; step < iterations; step++) {
    const shift = new Map<string, Point>(nodeIds.map((id) => [id, { x: 0, y: 0 }]));

    for (let i = 0; i < nodeIds.length; i++) {
      for (let j = i + 1; j < nodeIds.length; j++) {
        const a = positions.get(nodeIds[i]!)!;
        const b = positions.get(nodeIds[j]!)!;
        let dx = a.x - b.x;
        let dy = a.y - b.y;
        let dist = Math.hypot(dx, dy);
        if (dist < 1e-6) {
          // co-located nodes get a deterministic nudge apart
          dx = 0.1 + (i % 7) * 0.01;
          dy = 0.1 + (j % 5) * 0.01;
          dist = Math.hypot(dx, dy);
        }
        const force = (ideal * ideal) / dist;
        const fx = (dx / dist) * force;
        const fy = (dy / dist) * force;
        const da = shift.get(nodeIds[i]!)!;
        const db = shift.get(nodeIds[j]!)!;
        da.x += fx;
        da.y += fy;
        db.x -= fx;
        db.y -= fy;
      }
    }

    for (const [from, to] of springs) {
      const a = positions.get(from)!;
      const b = positions.get(to)!;
      const dx = a.x - b.x;
      const dy = a.y - b.y;
      const dist = Math.max(Math.hypot(dx, dy), 1e-6);
      const force = (dist * dist) / ideal;
      const fx = (dx / dist) * force;
      const fy = (dy / dist) * force;
      const da = shift.get(from)!;
      const db = shift.get(to)!;
      da.x -= fx;
      da.y -= fy;
      db.x += fx;
      db.y += fy;
    }

    for (const id of nodeIds) {
      const p = positions.get(id)!;
      const d = shift.get(id)!;
      // centering pull keeps disconnected components on canvas
      d.x += (width / 2 - p.x) * 0.02;
      d.y += (height / 2 - p.y) * 0.02;
      const magnitude = Math.max(Math.hypot(d.x, d.y), 1e-6);
      const capped = Math.min(magnitude, temperature);
      p.x += (d.x / magnitude) * capped;
      p.y += (d.y / magnitude) * capped;
      p.x = Math.min(width - margin, Math.max(margin, p.x));
      p.y = Math.min(height - margin, Math.max(margin, p.y));
    }
    temperature = Math.max(temperature - cooling, 0.5);
  }

  return positions;
}
