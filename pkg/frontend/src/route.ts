/** Schematic leg-sequence diagram: airports as nodes on a line, one arc per
 * flight with its price hovering above the segment. Pure markup, no tiles. */

import { dollars } from './format';
import type { ItineraryJson } from './types';

const WIDTH = 640;
const HEIGHT = 120;
const MARGIN = 56;

export function renderRouteDiagram(itinerary: ItineraryJson): string {
  const flights = [...itinerary.chosen_flights].sort((a, b) => a.leg - b.leg);
  if (flights.length === 0) return '';
  const airports = [flights[0].flight.origin, ...flights.map((f) => f.flight.destination)];
  const step = (WIDTH - 2 * MARGIN) / Math.max(airports.length - 1, 1);
  const y = HEIGHT - 36;

  const parts: string[] = [];
  parts.push(
    `<svg class="route" viewBox="0 0 ${WIDTH} ${HEIGHT}" role="img" ` +
    `aria-label="flight route">`,
  );
  flights.forEach((entry, i) => {
    const x1 = MARGIN + i * step;
    const x2 = MARGIN + (i + 1) * step;
    const mid = (x1 + x2) / 2;
    const arcTop = y - 40;
    parts.push(
      `<path d="M ${x1} ${y} Q ${mid} ${arcTop} ${x2} ${y}" class="route-arc"/>`,
      `<text x="${mid}" y="${arcTop + 4}" class="route-price" text-anchor="middle" ` +
      `data-price="${entry.flight.price}">${dollars(entry.flight.price)}</text>`,
    );
  });
  airports.forEach((code, i) => {
    const x = MARGIN + i * step;
    parts.push(
      `<circle cx="${x}" cy="${y}" r="6" class="route-node"/>`,
      `<text x="${x}" y="${y + 22}" class="route-label" text-anchor="middle">${code}</text>`,
    );
  });
  parts.push('</svg>');
  return parts.join('');
}
