/* tslint:disable */
/* eslint-disable */
export const memory: WebAssembly.Memory;
export const __wbg_roundtrip_free: (a: number, b: number) => void;
export const dihedral_matches_mosaic: (a: number, b: number, c: number) => [number, number, number];
export const dihedral_view: (a: number, b: number, c: number) => [number, number, number, number];
export const gamma_curves: (a: number, b: number, c: number, d: number, e: number) => [number, number, number, number];
export const roundtrip_error_rgba: (a: number, b: number) => [number, number];
export const roundtrip_height: (a: number) => number;
export const roundtrip_new: (a: number, b: number, c: number, d: number) => [number, number, number];
export const roundtrip_psnr: (a: number) => number;
export const roundtrip_raw_rgba: (a: number) => [number, number];
export const roundtrip_srgb_rgba: (a: number) => [number, number];
export const roundtrip_ssim: (a: number) => number;
export const roundtrip_width: (a: number) => number;
export const simplex_weights: (a: number, b: number) => [number, number];
export const __wbindgen_externrefs: WebAssembly.Table;
export const __externref_table_dealloc: (a: number) => void;
export const __wbindgen_free: (a: number, b: number, c: number) => void;
export const __wbindgen_malloc: (a: number, b: number) => number;
export const __wbindgen_start: () => void;
