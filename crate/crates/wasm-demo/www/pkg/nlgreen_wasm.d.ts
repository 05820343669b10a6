/* tslint:disable */
/* eslint-disable */

/**
 * Curves and summary of one calibration run.
 */
export class CalibrationRun {
    private constructor();
    free(): void;
    [Symbol.dispose](): void;
    readonly app: Float64Array;
    readonly er: Float64Array;
    readonly exact: Float64Array;
    readonly max_er: number;
    readonly min_er: number;
    readonly s2: number;
}

/**
 * Exponential nonlinearity with the given source: approximation at (s1, s2),
 * or with s2 optimized around the given value, against the reference solution.
 */
export function calibrate(source: string, s1: number, s2: number, optimize: boolean, t_max: number, dt: number): CalibrationRun;

/**
 * G at `n` evenly spaced lags on [0, t_max]. A NaN `s1` selects the
 * catalog's standard constants.
 */
export function kernel_curve(nonlinearity: string, s1: number, t_max: number, n: number): Float64Array;

/**
 * G(χ(x, t)) for the exponential kernel on an nx × nt grid (x-major), NaN
 * where χ² < 0 so the page can shade that region.
 */
export function lifted_kernel(s1: number, x0: number, x1: number, nx: number, t_max: number, nt: number): Float64Array;

export type InitInput = RequestInfo | URL | Response | BufferSource | WebAssembly.Module;

export interface InitOutput {
    readonly memory: WebAssembly.Memory;
    readonly __wbg_calibrationrun_free: (a: number, b: number) => void;
    readonly calibrate: (a: number, b: number, c: number, d: number, e: number, f: number, g: number) => [number, number, number];
    readonly calibrationrun_app: (a: number) => [number, number];
    readonly calibrationrun_er: (a: number) => [number, number];
    readonly calibrationrun_exact: (a: number) => [number, number];
    readonly calibrationrun_max_er: (a: number) => number;
    readonly calibrationrun_min_er: (a: number) => number;
    readonly calibrationrun_s2: (a: number) => number;
    readonly kernel_curve: (a: number, b: number, c: number, d: number, e: number) => [number, number, number, number];
    readonly lifted_kernel: (a: number, b: number, c: number, d: number, e: number, f: number) => [number, number, number, number];
    readonly __wbindgen_externrefs: WebAssembly.Table;
    readonly __wbindgen_malloc: (a: number, b: number) => number;
    readonly __wbindgen_realloc: (a: number, b: number, c: number, d: number) => number;
    readonly __externref_table_dealloc: (a: number) => void;
    readonly __wbindgen_free: (a: number, b: number, c: number) => void;
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
