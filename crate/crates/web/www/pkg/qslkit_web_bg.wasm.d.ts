/* tslint:disable */
/* eslint-disable */
export const memory: WebAssembly.Memory;
export const dephasing_curve: (a: number, b: number, c: number, d: number, e: number) => [number, number, number, number];
export const jc_point: (a: number, b: number, c: number, d: number, e: number) => [number, number, number, number];
export const jc_surface: (a: number, b: number, c: number, d: number, e: number) => [number, number, number, number];
export const __wbindgen_externrefs: WebAssembly.Table;
export const __externref_table_dealloc: (a: number) => void;
export const __wbindgen_free: (a: number, b: number, c: number) => void;
export const __wbindgen_start: () => void;
