/* tslint:disable */
/* eslint-disable */
export const memory: WebAssembly.Memory;
export const __wbg_calibrationrun_free: (a: number, b: number) => void;
export const calibrate: (a: number, b: number, c: number, d: number, e: number, f: number, g: number) => [number, number, number];
export const calibrationrun_app: (a: number) => [number, number];
export const calibrationrun_er: (a: number) => [number, number];
export const calibrationrun_exact: (a: number) => [number, number];
export const calibrationrun_max_er: (a: number) => number;
export const calibrationrun_min_er: (a: number) => number;
export const calibrationrun_s2: (a: number) => number;
export const kernel_curve: (a: number, b: number, c: number, d: number, e: number) => [number, number, number, number];
export const lifted_kernel: (a: number, b: number, c: number, d: number, e: number, f: number) => [number, number, number, number];
export const __wbindgen_externrefs: WebAssembly.Table;
export const __wbindgen_malloc: (a: number, b: number) => number;
export const __wbindgen_realloc: (a: number, b: number, c: number, d: number) => number;
export const __externref_table_dealloc: (a: number) => void;
export const __wbindgen_free: (a: number, b: number, c: number) => void;
export const __wbindgen_start: () => void;
