/* tslint:disable */
/* eslint-disable */

export class Flight {
    private constructor();
    free(): void;
    [Symbol.dispose](): void;
    /**
     * Body attitude relative to take-off, rad.
     */
    attitude(): Float64Array;
    com_x(): Float64Array;
    com_y(): Float64Array;
    omega_a(): Float64Array;
    omega_b(): Float64Array;
    phi(): Float64Array;
    t(): Float64Array;
    readonly apex: number;
    readonly distance: number;
    readonly omega_end: number;
    readonly relock_time: number;
    readonly rigid_apex: number;
    readonly rigid_omega: number;
}

export class SweepCurve {
    private constructor();
    free(): void;
    [Symbol.dispose](): void;
    apex(): Float64Array;
    distance(): Float64Array;
    omega_end(): Float64Array;
    roots(): Float64Array;
    /**
     * Parameter values in display units; failed points carry NaN metrics.
     */
    values(): Float64Array;
    readonly rigid_apex: number;
    readonly rigid_omega: number;
    readonly verdict: string;
}

export function optimize(name: string, lower: number, upper: number, stiffness: number, joint_x_mm: number, joint_y_mm: number): number;

export function simulate(stiffness: number, joint_x_mm: number, joint_y_mm: number): Flight;

export function sweep(name: string, lower: number, upper: number, points: number, stiffness: number, joint_x_mm: number, joint_y_mm: number): SweepCurve;

export type InitInput = RequestInfo | URL | Response | BufferSource | WebAssembly.Module;

export interface InitOutput {
    readonly memory: WebAssembly.Memory;
    readonly __wbg_flight_free: (a: number, b: number) => void;
    readonly __wbg_sweepcurve_free: (a: number, b: number) => void;
    readonly flight_apex: (a: number) => number;
    readonly flight_attitude: (a: number) => [number, number];
    readonly flight_com_x: (a: number) => [number, number];
    readonly flight_com_y: (a: number) => [number, number];
    readonly flight_distance: (a: number) => number;
    readonly flight_omega_a: (a: number) => [number, number];
    readonly flight_omega_b: (a: number) => [number, number];
    readonly flight_omega_end: (a: number) => number;
    readonly flight_phi: (a: number) => [number, number];
    readonly flight_relock_time: (a: number) => number;
    readonly flight_rigid_apex: (a: number) => number;
    readonly flight_rigid_omega: (a: number) => number;
    readonly flight_t: (a: number) => [number, number];
    readonly optimize: (a: number, b: number, c: number, d: number, e: number, f: number, g: number) => [number, number, number];
    readonly simulate: (a: number, b: number, c: number) => [number, number, number];
    readonly sweep: (a: number, b: number, c: number, d: number, e: number, f: number, g: number, h: number) => [number, number, number];
    readonly sweepcurve_apex: (a: number) => [number, number];
    readonly sweepcurve_distance: (a: number) => [number, number];
    readonly sweepcurve_omega_end: (a: number) => [number, number];
    readonly sweepcurve_rigid_apex: (a: number) => number;
    readonly sweepcurve_rigid_omega: (a: number) => number;
    readonly sweepcurve_roots: (a: number) => [number, number];
    readonly sweepcurve_values: (a: number) => [number, number];
    readonly sweepcurve_verdict: (a: number) => [number, number];
    readonly __wbindgen_externrefs: WebAssembly.Table;
    readonly __wbindgen_free: (a: number, b: number, c: number) => void;
    readonly __wbindgen_malloc: (a: number, b: number) => number;
    readonly __wbindgen_realloc: (a: number, b: number, c: number, d: number) => number;
    readonly __externref_table_dealloc: (a: number) => void;
    readonly __wbindgen_start: () => void;
}

export type SyncInitInput = BufferSource | WebAssembly.Module;

/**
 * Instantiates the given `module`, which can either be bytes or
 * a precompiled `WebAssembly.Module`.
 *
 * @param {{ module: SyncInitInput }} module - Passing `SyncInitInput` directly is deprecated.
 *
 * @returns {InitOutput}
 */
export function initSync(module: { module: SyncInitInput } | SyncInitInput): InitOutput;

/**
 * If `module_or_path` is {RequestInfo} or {URL}, makes a request and
 * for everything else, calls `WebAssembly.instantiate` directly.
 *
 * @param {{ module_or_path: InitInput | Promise<InitInput> }} module_or_path - Passing `InitInput` directly is deprecated.
 *
 * @returns {Promise<InitOutput>}
 */
export default function __wbg_init (module_or_path?: { module_or_path: InitInput | Promise<InitInput> } | InitInput | Promise<InitInput>): Promise<InitOutput>;
