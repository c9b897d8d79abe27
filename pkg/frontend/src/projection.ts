/**
 * Rotation and projection for the 3D tree view.
 *
 * World space is the alternate layout's: x and y span the unit square,
 * z goes down with search depth (0 at the top, negative below). The
 * camera orbits the square's center; orthographic projection keeps a
 * vertical view exactly congruent with the treemap.
 *
 * yaw spins the square in its own plane, pitch tilts from the side view
 * (0, tree layers stacked) up to the top view (PI/2, straight down).
 * Both are clamped to one quadrant, so the view can never flip over or
 * show the tree from behind.
 */
export interface Camera {
  readonly yaw: number;
  readonly pitch: number;
  readonly zoom: number;
  readonly panX: number;
  readonly panY: number;
}

export const QUADRANT = Math.PI / 2;

export const SIDE_VIEW: Camera = {
  yaw: 0, pitch: 0.35, zoom: 1, panX: 0, panY: 0,
};

export const TOP_VIEW: Camera = {
  yaw: 0, pitch: QUADRANT, zoom: 1, panX: 0, panY: 0,
};

const clamp = (v: number, lo: number, hi: number) =>
  v < lo ? lo : v > hi ? hi : v;

export function clampCamera(c: Camera): Camera {
  return {
    yaw: clamp(c.yaw, 0, QUADRANT),
    pitch: clamp(c.pitch, 0, QUADRANT),
    zoom: clamp(c.zoom, 0.1, 12),
    panX: c.panX,
    panY: c.panY,
  };
}

/**
 * World point -> view-plane point, both unitless. The view plane is
 * centered on the unit square's center; callers map it to pixels.
 */
export function project(x: number, y: number, z: number,
                        cam: Camera): [number, number] {
  const cx = x - 0.5;
  const cy = y - 0.5;
  const cosYaw = Math.cos(cam.yaw);
  const sinYaw = Math.sin(cam.yaw);
  const u = cx * cosYaw - cy * sinYaw;
  const v = cx * sinYaw + cy * cosYaw;
  const sy = v * Math.sin(cam.pitch) - z * Math.cos(cam.pitch);
  return [u, sy];
}

/**
 * View-plane point -> pixels for a size x size viewport, applying the
 * camera's zoom and pan. At zoom 1 and no pan a top view maps the unit
 * square onto the full viewport, matching the treemap's scaling.
 */
export function toScreen(p: readonly [number, number], cam: Camera,
                         size: number): [number, number] {
  return [
    size / 2 + p[0] * size * cam.zoom + cam.panX,
    size / 2 + p[1] * size * cam.zoom + cam.panY,
  ];
}

export function projectToScreen(x: number, y: number, z: number,
                                cam: Camera, size: number): [number, number] {
  return toScreen(project(x, y, z, cam), cam, size);
}
