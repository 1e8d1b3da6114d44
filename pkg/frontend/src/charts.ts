// Four schedule charts as pure SVG builders: price, power, EV battery,
// temperature. Everything is computed from the schedule payload; callers
// inject the markup into the page.

import type { SchedulePayload } from "./api";

export const CHART_WIDTH = 640;
export const CHART_HEIGHT = 170;
const MARGIN = { top: 14, right: 10, bottom: 18, left: 44 };

export interface Scale {
  min: number;
  max: number;
  toPixel: (value: number) => number;
}

export function linearScale(min: number, max: number, pixelA: number, pixelB: number): Scale {
  const span = max - min || 1;
  return {
    min,
    max,
    toPixel: (value: number) => pixelA + ((value - min) / span) * (pixelB - pixelA),
  };
}

export function seriesExtent(series: number[][], padFraction = 0.05): [number, number] {
  let min = Infinity;
  let max = -Infinity;
  for (const values of series) {
    for (const v of values) {
      if (v < min) min = v;
      if (v > max) max = v;
    }
  }
  if (!isFinite(min)) {
    return [0, 1];
  }
  const pad = (max - min || 1) * padFraction;
  return [min - pad, max + pad];
}

export function polylinePoints(values: number[], x: Scale, y: Scale): string {
  return values.map((v, i) => `${x.toPixel(i).toFixed(1)},${y.toPixel(v).toFixed(1)}`).join(" ");
}

interface Line {
  values: number[];
  color: string;
  label: string;
  dashed?: boolean;
}

function chart(title: string, lines: Line[], extras = "", yDomain?: [number, number]): string {
  const n = Math.max(...lines.map((l) => l.values.length));
  const x = linearScale(0, Math.max(n - 1, 1), MARGIN.left, CHART_WIDTH - MARGIN.right);
  const [lo, hi] = yDomain ?? seriesExtent(lines.map((l) => l.values));
  const y = linearScale(lo, hi, CHART_HEIGHT - MARGIN.bottom, MARGIN.top);
  const paths = lines
    .map(
      (line) =>
        `<polyline fill="none" stroke="${line.color}" stroke-width="1.5"` +
        `${line.dashed ? ' stroke-dasharray="5,3"' : ""} data-series="${line.label}" ` +
        `points="${polylinePoints(line.values, x, y)}"/>`,
    )
    .join("");
  const legend = lines
    .map(
      (line, i) =>
        `<text x="${MARGIN.left + i * 110}" y="${CHART_HEIGHT - 4}" fill="${line.color}" ` +
        `font-size="10">${line.label}</text>`,
    )
    .join("");
  const axis =
    `<text x="4" y="${MARGIN.top}" font-size="10" fill="#667">${hi.toFixed(1)}</text>` +
    `<text x="4" y="${CHART_HEIGHT - MARGIN.bottom}" font-size="10" fill="#667">${lo.toFixed(1)}</text>`;
  return (
    `<figure class="chart"><figcaption>${title}</figcaption>` +
    `<svg viewBox="0 0 ${CHART_WIDTH} ${CHART_HEIGHT}" role="img" aria-label="${title}">` +
    extras +
    paths +
    axis +
    legend +
    `</svg></figure>`
  );
}

export function occupancyShading(occupancy: boolean[], x: Scale): string {
  // Shade the away periods so home windows stand out.
  let rects = "";
  let start: number | null = null;
  for (let i = 0; i <= occupancy.length; i++) {
    const away = i < occupancy.length && !occupancy[i];
    if (away && start === null) {
      start = i;
    }
    if (!away && start !== null) {
      const x0 = x.toPixel(start);
      const x1 = x.toPixel(i);
      rects +=
        `<rect class="away" x="${x0.toFixed(1)}" y="${MARGIN.top}" ` +
        `width="${(x1 - x0).toFixed(1)}" height="${CHART_HEIGHT - MARGIN.top - MARGIN.bottom}" ` +
        `fill="#f5e9c8" opacity="0.6"/>`;
      start = null;
    }
  }
  return rects;
}

export function renderPriceChart(schedule: SchedulePayload): string {
  return chart("Electricity price over time (GBP/kWh)", [
    { values: schedule.price.import, color: "#c0392b", label: "import" },
    { values: schedule.price.feedin, color: "#27ae60", label: "feed-in", dashed: true },
  ], "");
}

export function renderPowerChart(schedule: SchedulePayload): string {
  const n = schedule.power.heating.length;
  const x = linearScale(0, Math.max(n - 1, 1), MARGIN.left, CHART_WIDTH - MARGIN.right);
  return chart(
    "Consumed power over time (kW)",
    [
      { values: schedule.power.heating, color: "#e67e22", label: "heating" },
      { values: schedule.power.ev, color: "#2980b9", label: "EV" },
      { values: schedule.power.other, color: "#c0392b", label: "other" },
      { values: schedule.power.solar, color: "#27ae60", label: "solar", dashed: true },
    ],
    occupancyShading(schedule.occupancy, x),
  );
}

export function renderBatteryChart(schedule: SchedulePayload): string {
  return chart("EV battery energy over time (kWh)", [
    { values: schedule.battery.energy, color: "#2980b9", label: "stored energy" },
  ]);
}

export function renderTemperatureChart(schedule: SchedulePayload): string {
  const { t_min: tMin, t_max: tMax } = schedule.temperature;
  const values = [schedule.temperature.house, schedule.temperature.outdoor];
  const [lo, hi] = seriesExtent(values, 0);
  const domain: [number, number] = [Math.min(lo, tMin - 2), Math.max(hi, tMax + 2)];
  const n = schedule.temperature.house.length;
  const x = linearScale(0, Math.max(n - 1, 1), MARGIN.left, CHART_WIDTH - MARGIN.right);
  const y = linearScale(domain[0], domain[1], CHART_HEIGHT - MARGIN.bottom, MARGIN.top);
  const band =
    `<rect class="comfort-band" x="${MARGIN.left}" y="${y.toPixel(tMax).toFixed(1)}" ` +
    `width="${CHART_WIDTH - MARGIN.left - MARGIN.right}" ` +
    `height="${(y.toPixel(tMin) - y.toPixel(tMax)).toFixed(1)}" fill="#d6eaf8" opacity="0.5"/>` +
    `<line x1="${MARGIN.left}" x2="${CHART_WIDTH - MARGIN.right}" ` +
    `y1="${y.toPixel(tMin).toFixed(1)}" y2="${y.toPixel(tMin).toFixed(1)}" ` +
    `stroke="#2471a3" stroke-dasharray="2,3" data-band="t_min"/>` +
    `<line x1="${MARGIN.left}" x2="${CHART_WIDTH - MARGIN.right}" ` +
    `y1="${y.toPixel(tMax).toFixed(1)}" y2="${y.toPixel(tMax).toFixed(1)}" ` +
    `stroke="#2471a3" stroke-dasharray="2,3" data-band="t_max"/>` +
    `${occupancyShading(schedule.occupancy, x)}`;
  return chart(
    "Temperature over time (degC)",
    [
      { values: schedule.temperature.house, color: "#27ae60", label: "house", dashed: true },
      { values: schedule.temperature.outdoor, color: "#8e44ad", label: "outdoor" },
    ],
    band,
    domain,
  );
}

export function renderAllCharts(schedule: SchedulePayload | null): string {
  if (schedule === null) {
    return `<p class="placeholder">The schedule will appear here once every parameter is stored.</p>`;
  }
  return (
    `<p class="costs">Optimized cost <strong>${schedule.total_cost.toFixed(2)} GBP</strong>` +
    ` vs naive ${schedule.naive_cost.toFixed(2)} GBP` +
    ` (${schedule.reduction_percent.toFixed(1)}% lower)</p>` +
    renderPriceChart(schedule) +
    renderPowerChart(schedule) +
    renderBatteryChart(schedule) +
    renderTemperatureChart(schedule)
  );
}
