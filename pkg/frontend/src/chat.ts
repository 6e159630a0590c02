/** Chat session controller: submit a request, show the three options,
 * select one. Pure state machine with an injected API and render sink, so
 * the whole flow is testable without a browser.
 *
 * One plan request is in flight per session: a newer submission bumps the
 * epoch and any stale response is dropped instead of rendered.
 */

import { Api, ApiError } from './api';
import type { OptionKey, SessionView } from './types';

export class ChatController {
  readonly view: SessionView = {
    messages: [],
    current: null,
    selectedKey: null,
    pending: false,
    inputText: '',
  };

  private epoch = 0;

  constructor(
    private api: Api,
    private onRender: (view: SessionView) => void,
  ) {}

  private render(): void {
    this.onRender(this.view);
  }

  canSubmit(): boolean {
    return this.view.inputText.trim().length > 0 && !this.view.pending;
  }

  setInput(text: string): void {
    this.view.inputText = text;
  }

  async submitRequest(text: string): Promise<void> {
    const trimmed = text.trim();
    if (!trimmed) return; // submit is disabled on empty input
    const epoch = ++this.epoch;
    this.view.inputText = text;
    this.view.pending = true;
    this.view.messages.push({ role: 'user', text: trimmed });
    this.render();
    try {
      const response = await this.api.plan(trimmed);
      if (epoch !== this.epoch) return; // superseded by a newer submission
      this.view.current = response;
      this.view.selectedKey = null;
      this.view.inputText = ''; // consumed only on success
      const feasible = Object.values(response.options).filter((o) => o.feasible).length;
      this.view.messages.push({
        role: 'system',
        text: `Here are your options (${feasible} of 3 feasible).`,
      });
    } catch (err) {
      if (epoch !== this.epoch) return;
      const message = err instanceof ApiError
        ? err.message
        : `unexpected response: ${String(err)}`;
      // input text is preserved so the user can edit and retry
      this.view.messages.push({ role: 'error', text: message });
    } finally {
      if (epoch === this.epoch) {
        this.view.pending = false;
        this.render();
      }
    }
  }

  async selectOption(key: OptionKey): Promise<void> {
    const current = this.view.current;
    if (!current) return;
    const option = current.options[key];
    if (!option || !option.feasible) return; // infeasible options are not selectable
    const alreadySelected = this.view.selectedKey === key;
    try {
      const ack = await this.api.select(current.session_id, key);
      this.view.selectedKey = key;
      if (!alreadySelected) {
        // re-selecting the same option does not grow the history
        this.view.messages.push({
          role: 'system',
          text: `Noted - you picked "${key}" (${ack.selected_at}).`,
        });
      }
    } catch (err) {
      if (err instanceof ApiError && err.status === 404) {
        this.view.messages.push({
          role: 'error',
          text: 'This session has expired; please submit the request again.',
        });
      } else {
        this.view.messages.push({ role: 'error', text: String(err) });
      }
    }
    this.render();
  }
}
