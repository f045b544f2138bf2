import { describe, expect, it } from 'vitest';
import { encodeCommand, parseServerMessage } from '../src/protocol.js';

const stateFrame = JSON.stringify({
  kind: 'state',
  frame: 3,
  event: 41,
  q: [2, 0, 7],
  queue_limit: 200,
  active_ue: 2,
  uav_sector: 12,
  ue_sectors: [1, 5, 12],
  ue_positions: [[10.0, 20.0], [-30.0, 4.0], [90.0, -10.0]],
  battery: 41234.5,
  drops_cumulative: [0, 0, 1],
  clock: 17.25,
});

describe('parseServerMessage', () => {
  it('round-trips a state frame', () => {
    const msg = parseServerMessage(stateFrame);
    expect(msg).not.toBeNull();
    if (msg?.kind !== 'state') throw new Error('expected state');
    expect(msg.q).toEqual([2, 0, 7]);
    expect(msg.active_ue).toBe(2);
    expect(msg.clock).toBeCloseTo(17.25);
  });

  it('accepts hello and error kinds', () => {
    const hello = parseServerMessage('{"kind":"hello","n_ues":5,"sectors":36,"queue_limit":200}');
    expect(hello?.kind).toBe('hello');
    const err = parseServerMessage('{"kind":"error","message":"nope"}');
    expect(err?.kind).toBe('error');
    if (err?.kind === 'error') expect(err.message).toBe('nope');
  });

  it('rejects frames that are not protocol messages', () => {
    expect(parseServerMessage('not json')).toBeNull();
    expect(parseServerMessage('42')).toBeNull();
    expect(parseServerMessage('{"no_kind":true}')).toBeNull();
    expect(parseServerMessage('{"kind":"warp"}')).toBeNull();
    expect(parseServerMessage('{"kind":"state","q":"oops","ue_sectors":[]}')).toBeNull();
    expect(parseServerMessage('{"kind":"hello","n_ues":"five"}')).toBeNull();
  });
});

describe('encodeCommand', () => {
  it('emits the exact select wire shape', () => {
    expect(JSON.parse(encodeCommand({ kind: 'select', ue: 3 }))).toEqual({ kind: 'select', ue: 3 });
  });

  it('emits pause, resume, and speed', () => {
    expect(encodeCommand({ kind: 'pause' })).toBe('{"kind":"pause"}');
    expect(encodeCommand({ kind: 'resume' })).toBe('{"kind":"resume"}');
    expect(JSON.parse(encodeCommand({ kind: 'speed', value: 4.5 }))).toEqual({ kind: 'speed', value: 4.5 });
  });
});
