/**
 * Car-following tasklet model: local world physics plus the bar-matching
 * aid.  A fixed-width bar shows the bumper's apparent size at the goal
 * gap; the instruction is pure geometry (wider bar means the car is too
 * far away).  All bit values shown next to the scene come from service
 * metric records, never from this module.
 */

export const DT = 1 / 60; // UI sample rate, seconds
export const MAX_ACCEL = 3.0; // m/s^2, pedal +1
export const MAX_BRAKE = 6.0; // m/s^2, pedal -1
export const BUMPER_WIDTH_M = 1.8;
export const FOCAL_PX = 900; // pinhole scale: px = focal * meters / distance

export interface CarWorld {
  t: number;
  leadPos: number;
  leadSpeed: number;
  followPos: number;
  followSpeed: number;
}

export type Instruction = "accelerate" | "decelerate" | "hold";

export function initialWorld(sLevel: number, speed: number): CarWorld {
  return { t: 0, leadPos: 0, leadSpeed: speed, followPos: -sLevel, followSpeed: speed };
}

export function gapOf(w: CarWorld): number {
  return w.leadPos - w.followPos;
}

/** Semi-implicit Euler, speeds clamped at zero (no reversing). */
export function stepWorld(w: CarWorld, pedal: number, leadAccel = 0, dt = DT): CarWorld {
  const a = pedal >= 0 ? pedal * MAX_ACCEL : pedal * MAX_BRAKE;
  const followSpeed = Math.max(0, w.followSpeed + a * dt);
  const leadSpeed = Math.max(0, w.leadSpeed + leadAccel * dt);
  return {
    t: w.t + dt,
    leadPos: w.leadPos + leadSpeed * dt,
    leadSpeed,
    followPos: w.followPos + followSpeed * dt,
    followSpeed,
  };
}

export function pedalFromKeys(up: boolean, down: boolean): number {
  if (up === down) return 0;
  return up ? 1 : -1;
}

/** Rendered width in px of an object of physical width `meters` at `distance`. */
export function apparentWidth(meters: number, distance: number, focal = FOCAL_PX): number {
  if (distance <= 0) return Number.POSITIVE_INFINITY;
  return (focal * meters) / distance;
}

/** The aid bar: the bumper's apparent width when the gap equals s_level. */
export function barWidth(sLevel: number, bumper = BUMPER_WIDTH_M, focal = FOCAL_PX): number {
  return apparentWidth(bumper, sLevel, focal);
}

/**
 * Accelerate exactly when the bar is wider than the bumper: the bumper
 * only looks narrower than its goal-gap size when the car is too far.
 */
export function instruction(gap: number, sLevel: number): Instruction {
  const bar = barWidth(sLevel);
  const bumper = apparentWidth(BUMPER_WIDTH_M, gap);
  if (bar > bumper) return "accelerate";
  if (bar < bumper) return "decelerate";
  return "hold";
}

export function collided(gap: number): boolean {
  return gap <= 0;
}

export interface CollisionFlash {
  until: number; // world time the flash ends
}

export function flashOnCollision(t: number, durationS = 0.6): CollisionFlash {
  return { until: t + durationS };
}
