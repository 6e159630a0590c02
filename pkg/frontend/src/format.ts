/** Display formatting. Amounts are shown exactly as the API reports them:
 * the UI never does its own money arithmetic. */

export function dollars(amount: number): string {
  return Number.isInteger(amount) ? `$${amount}` : `$${amount.toFixed(2)}`;
}

export function stars(rating: number): string {
  return `${rating.toFixed(1)}★`;
}

export function clockTime(isoDateTime: string): string {
  const timePart = isoDateTime.split('T')[1] ?? isoDateTime;
  return timePart.slice(0, 5);
}

export function shortDate(isoDate: string): string {
  return isoDate.split('T')[0];
}

export function escapeHtml(text: string): string {
  return text
    .replace(/&/g, '&amp;')
    .replace(/</g, '&lt;')
    .replace(/>/g, '&gt;')
    .replace(/"/g, '&quot;');
}
