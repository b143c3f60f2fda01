/* tslint:disable */
/* eslint-disable */

export class RoundTrip {
    free(): void;
    [Symbol.dispose](): void;
    /**
     * Absolute RAW error of the recovered image, scaled by `gain`.
     */
    error_rgba(gain: number): Uint8Array;
    height(): number;
    /**
     * Packed size `size`×`size`; the sRGB rendering is twice that.
     */
    constructor(seed: number, size: number, wb_r: number, wb_b: number);
    psnr(): number;
    raw_rgba(): Uint8Array;
    srgb_rgba(): Uint8Array;
    /**
     * NaN for scenes smaller than the SSIM window.
     */
    ssim(): number;
    /**
     * Full sensor resolution, the size of every image below.
     */
    width(): number;
}

/**
 * Whether the packed transform equals transforming the full mosaic.
 */
export function dihedral_matches_mosaic(seed: number, size: number, t: number): boolean;

/**
 * False-colour mosaic of the scene after transform `t` (0..8: bit 0
 * horizontal flip, bit 1 vertical flip, bit 2 transpose).
 */
export function dihedral_view(seed: number, size: number, t: number): Uint8Array;

export function gamma_curves(gammas: Float64Array, weights: Float64Array, samples: number): Float64Array;

export function simplex_weights(weights: Float64Array): Float64Array;

export type InitInput = RequestInfo | URL | Response | BufferSource | WebAssembly.Module;

export interface InitOutput {
    readonly memory: WebAssembly.Memory;
    readonly __wbg_roundtrip_free: (a: number, b: number) => void;
    readonly dihedral_matches_mosaic: (a: number, b: number, c: number) => [number, number, number];
    readonly dihedral_view: (a: number, b: number, c: number) => [number, number, number, number];
    readonly gamma_curves: (a: number, b: number, c: number, d: number, e: number) => [number, number, number, number];
    readonly roundtrip_error_rgba: (a: number, b: number) => [number, number];
    readonly roundtrip_height: (a: number) => number;
    readonly roundtrip_new: (a: number, b: number, c: number, d: number) => [number, number, number];
    readonly roundtrip_psnr: (a: number) => number;
    readonly roundtrip_raw_rgba: (a: number) => [number, number];
    readonly roundtrip_srgb_rgba: (a: number) => [number, number];
    readonly roundtrip_ssim: (a: number) => number;
    readonly roundtrip_width: (a: number) => number;
    readonly simplex_weights: (a: number, b: number) => [number, number];
    readonly __wbindgen_externrefs: WebAssembly.Table;
    readonly __externref_table_dealloc: (a: number) => void;
    readonly __wbindgen_free: (a: number, b: number, c: number) => void;
    readonly __wbindgen_malloc: (a: number, b: number) => number;
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
