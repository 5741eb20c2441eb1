/**
 * Synchronizes the native video player with the chart playhead.  Chart
 * time t corresponds to video time t + offset, so the playhead is always
 * the player's current time minus the offset; playback auto-pauses when
 * it leaves the brushed interval.
 */

import type { VideoLocator } from "./types";

export class PlayheadSync {
  playheadTime: number | null = null;
  private offsetS = 0;
  private brush: [number, number] | null = null;
  private readonly listener = () => this.tick();

  constructor(
    private video: HTMLVideoElement,
    private onTime: (time: number | null) => void,
  ) {
    video.addEventListener("timeupdate", this.listener);
  }

  /** Seek to the brush's offset-adjusted start and begin playback. */
  playBrush(locator: VideoLocator, brushT0: number, brushT1: number): void {
    this.offsetS = locator.start_s - brushT0;
    this.brush = [brushT0, brushT1];
    this.video.src = locator.path;
    this.video.currentTime = locator.start_s;
    try {
      // real browsers return a promise; test media stubs may throw
      void Promise.resolve(this.video.play?.()).catch(() => undefined);
    } catch {
      // playback stubs without play support
    }
    this.tick();
  }

  stop(): void {
    this.brush = null;
    this.playheadTime = null;
    try {
      this.video.pause?.();
    } catch {
      // media stubs without pause support
    }
    this.onTime(null);
  }

  dispose(): void {
    this.video.removeEventListener("timeupdate", this.listener);
  }

  private tick(): void {
    if (this.brush === null) return;
    const chartTime = this.video.currentTime - this.offsetS;
    if (chartTime >= this.brush[1]) {
      this.playheadTime = this.brush[1];
      this.onTime(this.playheadTime);
      this.stop();
      return;
    }
    this.playheadTime = Math.max(chartTime, this.brush[0]);
    this.onTime(this.playheadTime);
  }
}
