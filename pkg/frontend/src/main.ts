import { CheckClient, DEFAULT_BASE_URL } from './api.js';
import { DraftController } from './controller.js';
import { bannerModel } from './banner.js';

// API origin comes from ?api=... so the page can point at any running service.
const params = new URLSearchParams(window.location.search);
const client = new CheckClient(params.get('api') ?? DEFAULT_BASE_URL);
const controller = new DraftController((text) => client.check(text));

function element<T extends HTMLElement>(id: string): T {
  const found = document.getElementById(id);
  if (!found) throw new Error(`missing #${id}`);
  return found as T;
}

const draft = element<HTMLTextAreaElement>('draft');
const banner = element<HTMLDivElement>('banner');
const notice = element<HTMLDivElement>('notice');
const health = element<HTMLDivElement>('health');
const postButton = element<HTMLButtonElement>('post');
const postedNote = element<HTMLDivElement>('posted-note');

// The draft box is never disabled: every warning is advisory only.
draft.addEventListener('input', () => {
  postedNote.textContent = '';
  controller.onDraftChange(draft.value);
});

controller.subscribe((state) => {
  const model = bannerModel(state);
  banner.className = model.visible ? `banner risk-${model.risk}` : 'banner hidden';
  banner.replaceChildren(
    ...model.lines.map((line) => {
      const row = document.createElement('div');
      row.className = 'warning-line';
      row.textContent = `${line.icon} ${line.label}: ${line.detail}`;
      return row;
    }),
  );
  notice.textContent = model.notice ?? '';
  notice.className = model.notice ? 'notice' : 'notice hidden';
});

// Demo-only "post": nothing leaves the page.
postButton.addEventListener('click', () => {
  if (draft.value.trim() === '') return;
  postedNote.textContent = 'Posted (demo only, nothing was sent anywhere).';
  draft.value = '';
  controller.onDraftChange('');
});

client.health().then(
  (status) => {
    const stages = Object.keys(status.fingerprints).join(', ');
    health.textContent = `service ${status.status}, stages: ${stages}`;
  },
  () => {
    health.textContent = 'service unreachable, live checks disabled';
  },
);
