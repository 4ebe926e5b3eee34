/* tslint:disable */
/* eslint-disable */
export const memory: WebAssembly.Memory;
export const __wbg_flight_free: (a: number, b: number) => void;
export const __wbg_sweepcurve_free: (a: number, b: number) => void;
export const flight_apex: (a: number) => number;
export const flight_attitude: (a: number) => [number, number];
export const flight_com_x: (a: number) => [number, number];
export const flight_com_y: (a: number) => [number, number];
export const flight_distance: (a: number) => number;
export const flight_omega_a: (a: number) => [number, number];
export const flight_omega_b: (a: number) => [number, number];
export const flight_omega_end: (a: number) => number;
export const flight_phi: (a: number) => [number, number];
export const flight_relock_time: (a: number) => number;
export const flight_rigid_apex: (a: number) => number;
export const flight_rigid_omega: (a: number) => number;
export const flight_t: (a: number) => [number, number];
export const optimize: (a: number, b: number, c: number, d: number, e: number, f: number, g: number) => [number, number, number];
export const simulate: (a: number, b: number, c: number) => [number, number, number];
export const sweep: (a: number, b: number, c: number, d: number, e: number, f: number, g: number, h: number) => [number, number, number];
export const sweepcurve_apex: (a: number) => [number, number];
export const sweepcurve_distance: (a: number) => [number, number];
export const sweepcurve_omega_end: (a: number) => [number, number];
export const sweepcurve_rigid_apex: (a: number) => number;
export const sweepcurve_rigid_omega: (a: number) => number;
export const sweepcurve_roots: (a: number) => [number, number];
export const sweepcurve_values: (a: number) => [number, number];
export const sweepcurve_verdict: (a: number) => [number, number];
export const __wbindgen_externrefs: WebAssembly.Table;
export const __wbindgen_free: (a: number, b: number, c: number) => void;
export const __wbindgen_malloc: (a: number, b: number) => number;
export const __wbindgen_realloc: (a: number, b: number, c: number, d: number) => number;
export const __externref_table_dealloc: (a: number) => void;
export const __wbindgen_start: () => void;
