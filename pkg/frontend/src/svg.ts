/** String-assembled SVG primitives; no DOM required. */

import type { Scale } from "./scales.js";
import { formatTick } from "./scales.js";

export const PALETTE = [
  "#1f6fb3",
  "#c8401f",
  "#2a8a3c",
  "#7d3fa8",
  "#b0760b",
  "#20808d",
];

export function esc(s: string): string {
  return s.replace(/&/g, "&amp;").replace(/</g, "&lt;").replace(/>/g, "&gt;");
}

export function polyline(
  pts: Array<[number, number]>,
  color: string,
  opts: { dash?: string; width?: number } = {},
): string {
  const attr = pts.map(([x, y]) => `${x.toFixed(2)},${y.toFixed(2)}`).join(" ");
  const dash = opts.dash ? ` stroke-dasharray="${opts.dash}"` : "";
  return `<polyline points="${attr}" fill="none" stroke="${color}" stroke-width="${opts.width ?? 1.5}"${dash}/>`;
}

export function text(
  x: number,
  y: number,
  s: string,
  opts: { size?: number; anchor?: string; color?: string } = {},
): string {
  return (
    `<text x="${x.toFixed(1)}" y="${y.toFixed(1)}" font-size="${opts.size ?? 11}"` +
    ` font-family="sans-serif" text-anchor="${opts.anchor ?? "start"}"` +
    ` fill="${opts.color ?? "#222"}">${esc(s)}</text>`
  );
}

export function axes(
  xScale: Scale,
  yScale: Scale,
  xLabel: string,
  yLabel: string,
): string {
  const [x0, x1] = xScale.range;
  const [y0, y1] = yScale.range;
  const parts: string[] = [];
  parts.push(
    `<rect x="${x0}" y="${y1}" width="${x1 - x0}" height="${y0 - y1}" fill="none" stroke="#444"/>`,
  );
  for (const v of xScale.ticks()) {
    const px = xScale(v);
    parts.push(`<line x1="${px.toFixed(2)}" y1="${y0}" x2="${px.toFixed(2)}" y2="${y0 + 4}" stroke="#444"/>`);
    parts.push(`<line x1="${px.toFixed(2)}" y1="${y0}" x2="${px.toFixed(2)}" y2="${y1}" stroke="#ddd" stroke-width="0.5"/>`);
    parts.push(text(px, y0 + 16, formatTick(v), { anchor: "middle" }));
  }
  for (const v of yScale.ticks()) {
    const py = yScale(v);
    parts.push(`<line x1="${x0 - 4}" y1="${py.toFixed(2)}" x2="${x0}" y2="${py.toFixed(2)}" stroke="#444"/>`);
    parts.push(`<line x1="${x0}" y1="${py.toFixed(2)}" x2="${x1}" y2="${py.toFixed(2)}" stroke="#ddd" stroke-width="0.5"/>`);
    parts.push(text(x0 - 7, py + 3.5, formatTick(v), { anchor: "end" }));
  }
  parts.push(text((x0 + x1) / 2, y0 + 32, xLabel, { anchor: "middle", size: 12 }));
  parts.push(
    `<text x="14" y="${(y0 + y1) / 2}" font-size="12" font-family="sans-serif" ` +
      `text-anchor="middle" fill="#222" transform="rotate(-90 14 ${(y0 + y1) / 2})">${esc(yLabel)}</text>`,
  );
  return parts.join("\n");
}

export function document(width: number, height: number, body: string): string {
  return (
    `<svg xmlns="http://www.w3.org/2000/svg" width="${width}" height="${height}" ` +
    `viewBox="0 0 ${width} ${height}">\n<rect width="100%" height="100%" fill="white"/>\n` +
    body +
    "\n</svg>\n"
  );
}
