/** Option cards and the tabular itinerary view.
 *
 * Every number shown here is copied verbatim from the PlanResponse - the
 * UI performs no cost arithmetic of its own.
 */

import { clockTime, dollars, escapeHtml, shortDate, stars } from './format';
import { renderRouteDiagram } from './route';
import type { OptionKey, PlanOption, PlanResponse } from './types';
import { OPTION_KEYS, OPTION_TITLES } from './types';

function itineraryTable(option: PlanOption): string {
  const itinerary = option.itinerary!;
  const cost = option.cost!;
  const rows: string[] = [];
  rows.push('<table class="itinerary">');
  rows.push(
    '<tr class="totals-row">' +
    `<th>Total</th><td class="grand-total" data-amount="${cost.grand_total}">` +
    `${dollars(cost.grand_total)}</td>` +
    `<td>flights <span class="flight-total" data-amount="${cost.flight_total}">` +
    `${dollars(cost.flight_total)}</span></td>` +
    `<td>hotels <span class="hotel-total" data-amount="${cost.hotel_total}">` +
    `${dollars(cost.hotel_total)}</span></td></tr>`,
  );
  for (const { leg, flight } of itinerary.chosen_flights) {
    rows.push(
      `<tr class="flight-row" data-leg="${leg}">` +
      `<th>${flight.origin} → ${flight.destination}</th>` +
      `<td>${shortDate(flight.departure)} ${clockTime(flight.departure)}` +
      `–${clockTime(flight.arrival)}</td>` +
      `<td>${escapeHtml(flight.airline)}${flight.is_nonstop ? ', nonstop' : ''}</td>` +
      `<td class="flight-price" data-amount="${flight.price}">${dollars(flight.price)}</td></tr>`,
    );
  }
  for (const { hotel, first_night, last_night } of itinerary.chosen_hotels) {
    rows.push(
      `<tr class="hotel-row">` +
      `<th>${escapeHtml(hotel.name)}</th>` +
      `<td>${first_night} → ${last_night}</td>` +
      `<td class="hotel-rating">${stars(hotel.rating)}</td>` +
      `<td class="hotel-price" data-amount="${hotel.price_per_night}">` +
      `${dollars(hotel.price_per_night)}/night</td></tr>`,
    );
  }
  rows.push('</table>');
  return rows.join('') + renderRouteDiagram(itinerary);
}

export function renderOptionCard(
  key: OptionKey,
  option: PlanOption,
  selected: boolean,
): string {
  const classes = ['option-card'];
  if (selected) classes.push('selected');
  if (!option.feasible) classes.push('infeasible');
  const body = option.feasible
    ? itineraryTable(option)
    : `<p class="reason">${escapeHtml(option.reason ?? 'infeasible')}</p>`;
  const action = option.feasible
    ? `<button class="select-btn" data-option="${key}">` +
      `${selected ? 'Selected ✓' : 'Select this plan'}</button>`
    : '';
  return (
    `<article class="${classes.join(' ')}" data-option="${key}">` +
    `<h3>${OPTION_TITLES[key]}</h3>${body}${action}</article>`
  );
}

export function renderOptionCards(
  response: PlanResponse,
  selectedKey: OptionKey | null,
): string {
  return OPTION_KEYS
    .map((key) => renderOptionCard(key, response.options[key], selectedKey === key))
    .join('');
}
