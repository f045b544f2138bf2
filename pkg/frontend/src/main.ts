import { parseServerMessage, StateSnapshot } from './protocol.js';
import { UiStore } from './state.js';
import { barViews } from './bars.js';
import { DEFAULT_RING, positionMarker, sectorMarker, sectorPath } from './ring.js';
import { openSocket } from './ws.js';

const SVG_NS = 'http://www.w3.org/2000/svg';

const store = new UiStore();

const banner = el('banner');
const readout = el('readout');
const barsBox = el('bars');
const ringSvg = el('ring') as unknown as SVGSVGElement;
const buttonBox = el('ue-buttons');
const pauseBtn = el('pause') as HTMLButtonElement;
const speedSlider = el('speed') as HTMLInputElement;
const speedLabel = el('speed-label');
const errorLine = el('error-line');

function el(id: string): HTMLElement {
  const node = document.getElementById(id);
  if (!node) throw new Error(`missing #${id}`);
  return node;
}

// -- socket -----------------------------------------------------------------

const socket = openSocket(`ws://${location.host}/ws`, {
  onRaw(text) {
    const msg = parseServerMessage(text);
    if (!msg) return;
    store.handleMessage(msg);
    if (msg.kind === 'hello') buildControls(msg.n_ues, msg.sectors);
    if (msg.kind === 'state') renderState(msg);
    if (msg.kind === 'error') errorLine.textContent = msg.message;
  },
  onStatus(status) {
    store.setStatus(status);
    banner.textContent =
      status === 'open' ? 'connected' :
      status === 'closed' ? 'disconnected, retrying' : 'connecting';
    banner.className = `banner ${status}`;
  },
});

// -- one-time DOM built from the hello --------------------------------------

let built = false;
let wedges: SVGPathElement[] = [];
let bars: { fill: HTMLElement; label: HTMLElement; drops: HTMLElement; root: HTMLElement }[] = [];
let ueButtons: HTMLButtonElement[] = [];
let uavDot: SVGCircleElement;
let ueDots: SVGGElement[] = [];

function buildControls(nUes: number, sectors: number) {
  if (built) return;
  built = true;

  for (let i = 0; i < nUes; i++) {
    const root = document.createElement('div');
    root.className = 'bar';
    const fill = document.createElement('div');
    fill.className = 'bar-fill';
    const label = document.createElement('div');
    label.className = 'bar-label';
    const drops = document.createElement('div');
    drops.className = 'bar-drops';
    root.append(fill, label, drops);
    root.addEventListener('click', () => select(i));
    barsBox.appendChild(root);
    bars.push({ fill, label, drops, root });

    const btn = document.createElement('button');
    btn.textContent = `UE ${i} [${i + 1}]`;
    btn.addEventListener('click', () => select(i));
    buttonBox.appendChild(btn);
    ueButtons.push(btn);
  }

  for (let s = 1; s <= sectors; s++) {
    const path = document.createElementNS(SVG_NS, 'path');
    path.setAttribute('d', sectorPath(DEFAULT_RING, s, sectors));
    path.setAttribute('class', 'wedge');
    ringSvg.appendChild(path);
    wedges.push(path);
  }

  uavDot = document.createElementNS(SVG_NS, 'circle');
  uavDot.setAttribute('r', '9');
  uavDot.setAttribute('class', 'uav');
  ringSvg.appendChild(uavDot);

  for (let i = 0; i < nUes; i++) {
    const g = document.createElementNS(SVG_NS, 'g');
    const dot = document.createElementNS(SVG_NS, 'circle');
    dot.setAttribute('r', '6');
    const tag = document.createElementNS(SVG_NS, 'text');
    tag.setAttribute('dy', '-10');
    tag.setAttribute('text-anchor', 'middle');
    tag.textContent = String(i);
    g.append(dot, tag);
    g.setAttribute('class', 'ue');
    ringSvg.appendChild(g);
    ueDots.push(g);
  }
}

// -- per-snapshot rendering; every number comes from the snapshot -----------

function renderState(snap: StateSnapshot) {
  if (!built) buildControls(snap.q.length, snap.ue_sectors.length ? inferSectors(snap) : 36);

  readout.textContent =
    `frame ${snap.frame}  event ${snap.event}  ` +
    `clock ${snap.clock.toFixed(1)}s  battery ${snap.battery.toFixed(0)} J`;

  for (const view of barViews(snap, store.pendingSelect)) {
    const bar = bars[view.ue];
    if (!bar) continue;
    bar.fill.style.height = `${Math.min(view.frac, 1) * 100}%`;
    bar.label.textContent = `UE ${view.ue}: ${view.q}`;
    bar.drops.textContent = `drops ${view.drops}`;
    bar.root.className = 'bar'
      + (view.active ? ' active' : '')
      + (view.full ? ' full' : '')
      + (view.pending ? ' pending' : '');
    const btn = ueButtons[view.ue];
    if (btn) btn.className = view.active ? 'active' : view.pending ? 'pending' : '';
  }

  const sectors = wedges.length;
  if (sectors > 0) {
    const servedSector = snap.ue_sectors[snap.active_ue];
    wedges.forEach((w, idx) => {
      const s = idx + 1;
      w.setAttribute('class', 'wedge'
        + (s === snap.uav_sector ? ' uav-here' : '')
        + (s === servedSector ? ' served' : ''));
    });
    const uav = sectorMarker(DEFAULT_RING, snap.uav_sector, sectors);
    uavDot.setAttribute('cx', String(uav.x));
    uavDot.setAttribute('cy', String(uav.y));
    snap.ue_positions.forEach((pos, i) => {
      const g = ueDots[i];
      if (!g) return;
      const p = positionMarker(DEFAULT_RING, pos);
      g.setAttribute('transform', `translate(${p.x} ${p.y})`);
      g.setAttribute('class', 'ue' + (i === snap.active_ue ? ' active' : ''));
    });
  }
}

function inferSectors(snap: StateSnapshot): number {
  // hello normally arrives first; tolerate a snapshot-first race
  return Math.max(snap.uav_sector, ...snap.ue_sectors);
}

// -- operator input ----------------------------------------------------------

function select(ue: number) {
  if (socket.send({ kind: 'select', ue })) {
    store.requestSelect(ue);
    errorLine.textContent = '';
  }
}

function togglePause() {
  store.paused = !store.paused;
  socket.send({ kind: store.paused ? 'pause' : 'resume' });
  pauseBtn.textContent = store.paused ? 'resume [space]' : 'pause [space]';
}

pauseBtn.addEventListener('click', togglePause);

speedSlider.addEventListener('input', () => {
  const value = Number(speedSlider.value);
  speedLabel.textContent = `${value.toFixed(1)} ev/s`;
  socket.send({ kind: 'speed', value });
});

document.addEventListener('keydown', (e) => {
  if (e.code === 'Space') {
    e.preventDefault();
    togglePause();
    return;
  }
  const digit = Number(e.key);
  if (Number.isInteger(digit) && digit >= 1 && digit <= ueButtons.length) {
    select(digit - 1);
  }
});

window.addEventListener('beforeunload', () => socket.close());
