/**
 * Local four-voice chord playback via Web Audio. The oscillators follow
 * the frequencies the server sends (chord_on effects); the offline WAV
 * render on the Python side stays the canonical audio path, these voices
 * exist for live low-latency monitoring.
 *
 * When no AudioContext is available (headless, autoplay-blocked) the
 * player stays in visual-only mode: `available` is false and every call
 * is a safe no-op, so the UI keeps running and shows an indicator.
 */

const VOICES = 4;
const VOICE_GAIN = 0.2;
const GLIDE_S = 0.01; // one-callback-ish retarget ramp

type AudioContextCtor = new () => AudioContext;

export class ChordPlayer {
  readonly available: boolean;
  private ctx: AudioContext | null = null;
  private oscillators: OscillatorNode[] = [];
  private gains: GainNode[] = [];
  private master: GainNode | null = null;
  private started = false;

  constructor(ctor?: AudioContextCtor) {
    const AudioCtor =
      ctor ?? (typeof AudioContext !== "undefined" ? AudioContext : undefined);
    if (!AudioCtor) {
      this.available = false;
      return;
    }
    try {
      this.ctx = new AudioCtor();
      this.available = true;
    } catch {
      this.available = false;
    }
  }

  /** Lazily build the graph; browsers require a user gesture first. */
  private ensureGraph(): void {
    if (!this.ctx || this.started) return;
    this.master = this.ctx.createGain();
    this.master.gain.value = 1;
    this.master.connect(this.ctx.destination);
    for (let i = 0; i < VOICES; i++) {
      const osc = this.ctx.createOscillator();
      const gain = this.ctx.createGain();
      osc.type = "sine";
      gain.gain.value = 0;
      osc.connect(gain);
      gain.connect(this.master);
      osc.start();
      this.oscillators.push(osc);
      this.gains.push(gain);
    }
    this.started = true;
  }

  /** Retarget the four voices to the served frequencies. */
  playChord(freqs: number[]): void {
    if (!this.ctx) return;
    void this.ctx.resume();
    this.ensureGraph();
    const t = this.ctx.currentTime;
    for (let i = 0; i < VOICES; i++) {
      const osc = this.oscillators[i];
      const gain = this.gains[i];
      const freq = freqs[i];
      if (!osc || !gain) continue;
      if (freq === undefined) {
        gain.gain.setTargetAtTime(0, t, GLIDE_S);
        continue;
      }
      osc.frequency.setTargetAtTime(freq, t, GLIDE_S);
      gain.gain.setTargetAtTime(VOICE_GAIN, t, GLIDE_S);
    }
  }

  /** End-of-game fade: ramp the master gain to silence. */
  fadeOut(seconds: number): void {
    if (!this.ctx || !this.master) return;
    const t = this.ctx.currentTime;
    this.master.gain.cancelScheduledValues(t);
    this.master.gain.setValueAtTime(this.master.gain.value, t);
    this.master.gain.linearRampToValueAtTime(0, t + seconds);
  }

  silence(): void {
    if (!this.ctx) return;
    const t = this.ctx.currentTime;
    for (const gain of this.gains) {
      gain.gain.setTargetAtTime(0, t, GLIDE_S);
    }
  }
}
