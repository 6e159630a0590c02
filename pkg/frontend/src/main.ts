/** Browser entry point: wires the controller to the DOM. */

import { Api } from './api';
import { renderOptionCards } from './cards';
import { ChatController } from './chat';
import { escapeHtml } from './format';
import type { OptionKey, SessionView } from './types';

function renderView(view: SessionView): void {
  const log = document.getElementById('chat-log')!;
  log.innerHTML = view.messages
    .map((m) => `<div class="msg msg-${m.role}">${escapeHtml(m.text)}</div>`)
    .join('');

  const cards = document.getElementById('cards')!;
  cards.innerHTML = view.current
    ? renderOptionCards(view.current, view.selectedKey)
    : '';

  const button = document.getElementById('send') as HTMLButtonElement;
  const input = document.getElementById('request-text') as HTMLTextAreaElement;
  button.disabled = view.pending || input.value.trim().length === 0;
  button.textContent = view.pending ? 'Planning…' : 'Plan my trip';
  log.scrollTop = log.scrollHeight;
}

function start(): void {
  const api = new Api('');
  const controller = new ChatController(api, renderView);

  const input = document.getElementById('request-text') as HTMLTextAreaElement;
  const button = document.getElementById('send') as HTMLButtonElement;

  input.addEventListener('input', () => {
    controller.setInput(input.value);
    button.disabled = input.value.trim().length === 0 || controller.view.pending;
  });

  button.addEventListener('click', () => {
    void controller.submitRequest(input.value).then(() => {
      input.value = controller.view.inputText;
    });
  });

  document.getElementById('cards')!.addEventListener('click', (event) => {
    const target = (event.target as HTMLElement).closest('.select-btn');
    if (target) {
      void controller.selectOption(target.getAttribute('data-option') as OptionKey);
    }
  });

  button.disabled = true;
}

document.addEventListener('DOMContentLoaded', start);
