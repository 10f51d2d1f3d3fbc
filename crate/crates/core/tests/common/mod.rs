//! Helpers shared by integration tests: corpus access, random scripts and
//! brute-force reference implementations that avoid the library's filters.
#![allow(dead_code)]

use std::path::PathBuf;

use aesthetica::imaging::{load_image, RasterImage, SeededRandom};
use aesthetica::uglifier::{PalettePreset, Step};

pub fn corpus_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("fixtures/corpus")
}

/// The 20 bundled photos in file-name order.
pub fn corpus() -> Vec<(String, RasterImage)> {
    let mut paths: Vec<PathBuf> = std::fs::read_dir(corpus_dir())
        .unwrap()
        .map(|e| e.unwrap().path())
        .filter(|p| p.extension().is_some_and(|e| e == "png"))
        .collect();
    paths.sort();
    paths
        .into_iter()
        .map(|p| {
            let name = p.file_stem().unwrap().to_string_lossy().into_owned();
            (name, load_image(&p).unwrap())
        })
        .collect()
}

/// A random valid step; crops keep at least half of each side.
pub fn random_step(rng: &mut SeededRandom) -> Step {
    let t = |rng: &mut SeededRandom| rng.uniform(-1.0, 1.0);
    let s = |rng: &mut SeededRandom| rng.uniform(0.0, 1.0);
    match rng.below(11) {
        0 => Step::Lightness { t: t(rng) },
        1 => Step::Contrast { t: t(rng) },
        2 => Step::ColorInvert { s: s(rng) },
        3 => Step::PhaseNoise { s: s(rng), seed: rng.next_u64() },
        4 => Step::ChannelGain {
            gains: [rng.uniform(0.0, 2.0), rng.uniform(0.0, 2.0), rng.uniform(0.0, 2.0)],
        },
        5 => {
            let mut order = [0usize, 1, 2];
            rng.shuffle(&mut order);
            Step::ChannelPermute { order }
        }
        6 => Step::Grayscale,
        7 => Step::RandomNoise { s: s(rng), seed: rng.next_u64() },
        8 => Step::BlurSharpen { t: t(rng) },
        9 => Step::PaletteExchange {
            preset: PalettePreset::ALL[rng.below(4) as usize],
        },
        _ => {
            let w = rng.uniform(0.5, 1.0);
            let h = rng.uniform(0.5, 1.0);
            Step::Crop {
                x: rng.uniform(0.0, 1.0 - w),
                y: rng.uniform(0.0, 1.0 - h),
                w,
                h,
            }
        }
    }
}

pub fn random_steps(rng: &mut SeededRandom, max_len: u64) -> Vec<Step> {
    let n = 1 + rng.below(max_len);
    (0..n).map(|_| random_step(rng)).collect()
}

// ---- reference colour conversion -------------------------------------

fn linearize(v: f64) -> f64 {
    if v <= 0.04045 {
        v / 12.92
    } else {
        ((v + 0.055) / 1.055).powf(2.4)
    }
}

fn f_lab(t: f64) -> f64 {
    let eps = 216.0 / 24389.0;
    let kappa = 24389.0 / 27.0;
    if t > eps {
        t.cbrt()
    } else {
        (kappa * t + 16.0) / 116.0
    }
}

/// sRGB (unit) to CIELAB with the white taken as the XYZ of RGB = (1,1,1).
pub fn reference_lab(rgb: [f64; 3]) -> [f64; 3] {
    const M: [[f64; 3]; 3] = [
        [0.4124564, 0.3575761, 0.1804375],
        [0.2126729, 0.7151522, 0.0721750],
        [0.0193339, 0.1191920, 0.9503041],
    ];
    let lin = rgb.map(linearize);
    let mut ratio = [0.0; 3];
    for r in 0..3 {
        let xyz: f64 = (0..3).map(|c| M[r][c] * lin[c]).sum();
        let white: f64 = M[r].iter().sum();
        ratio[r] = xyz / white;
    }
    let (fx, fy, fz) = (f_lab(ratio[0]), f_lab(ratio[1]), f_lab(ratio[2]));
    [116.0 * fy - 16.0, 500.0 * (fx - fy), 200.0 * (fy - fz)]
}

// ---- images as plain nested vectors -----------------------------------

pub type Grid = Vec<Vec<f64>>;

pub fn rgb_grids(img: &RasterImage) -> [Grid; 3] {
    let (w, h) = (img.width(), img.height());
    let grid = |k: usize| (0..h).map(|y| (0..w).map(|x| img.plane(k).get(x, y)).collect()).collect();
    [grid(0), grid(1), grid(2)]
}

fn mirror(i: isize, n: usize) -> usize {
    // half-sample symmetric: ... 1 0 | 0 1 2 ... n-1 | n-1 n-2 ...
    let n = n as isize;
    let mut i = i;
    loop {
        if i < 0 {
            i = -i - 1;
        } else if i >= n {
            i = 2 * n - i - 1;
        } else {
            return i as usize;
        }
    }
}

/// Direct 2-D convolution with a truncated isotropic Gaussian of radius
/// ceil(4 sigma), normalised over its full square support.
pub fn brute_gaussian(g: &Grid, sigma: f64) -> Grid {
    let (h, w) = (g.len(), g[0].len());
    let r = (4.0 * sigma).ceil() as isize;
    let mut weights = Vec::new();
    let mut total = 0.0;
    for dy in -r..=r {
        for dx in -r..=r {
            let v = (-((dx * dx + dy * dy) as f64) / (2.0 * sigma * sigma)).exp();
            weights.push((dx, dy, v));
            total += v;
        }
    }
    (0..h)
        .map(|y| {
            (0..w)
                .map(|x| {
                    weights
                        .iter()
                        .map(|&(dx, dy, v)| v * g[mirror(y as isize + dy, h)][mirror(x as isize + dx, w)])
                        .sum::<f64>()
                        / total
                })
                .collect()
        })
        .collect()
}

/// (c_lab, c_l, c_ab) computed from scratch.
pub fn brute_multiscale_contrast(img: &RasterImage) -> (f64, f64, f64) {
    let (w, h) = (img.width(), img.height());
    let rgb = rgb_grids(img);
    let mut lab: [Grid; 3] = [vec![vec![0.0; w]; h], vec![vec![0.0; w]; h], vec![vec![0.0; w]; h]];
    for y in 0..h {
        for x in 0..w {
            let px = [rgb[0][y][x], rgb[1][y][x], rgb[2][y][x]];
            let v = if px[0] == px[1] && px[1] == px[2] {
                // neutral: a = b = 0 exactly
                let l = reference_lab(px)[0];
                [l, 0.0, 0.0]
            } else {
                reference_lab(px)
            };
            for k in 0..3 {
                lab[k][y][x] = v[k];
            }
        }
    }
    let mut sigmas = Vec::new();
    let mut s = ((w * w + h * h) as f64).sqrt() / 2.0;
    while s >= 4.0 {
        sigmas.push(s);
        s /= 2.0;
    }
    let n = (w * h) as f64;
    let (mut a, mut b, mut c) = (0.0, 0.0, 0.0);
    for &s in &sigmas {
        let d: Vec<Grid> = lab
            .iter()
            .map(|p| {
                let g1 = brute_gaussian(p, s);
                let g2 = brute_gaussian(p, 2.0 * s);
                g1.iter().zip(&g2).map(|(r1, r2)| r1.iter().zip(r2).map(|(u, v)| u - v).collect()).collect()
            })
            .collect();
        for y in 0..h {
            for x in 0..w {
                let (l, aa, bb) = (d[0][y][x], d[1][y][x], d[2][y][x]);
                a += (l * l + aa * aa + bb * bb).sqrt() / n;
                b += l.abs() / n;
                c += (aa * aa + bb * bb).sqrt() / n;
            }
        }
    }
    let m = sigmas.len() as f64;
    (a / m, b / m, c / m)
}

/// Focus measure from finite differences written out per pixel.
pub fn brute_focus(img: &RasterImage) -> f64 {
    let (w, h) = (img.width(), img.height());
    let rgb = rgb_grids(img);
    let g: Grid = (0..h)
        .map(|y| (0..w).map(|x| 0.299 * rgb[0][y][x] + 0.587 * rgb[1][y][x] + 0.114 * rgb[2][y][x]).collect())
        .collect();
    let at = |x: isize, y: isize| g[mirror(y, h)][mirror(x, w)];
    let mut total = 0.0;
    for y in 0..h as isize {
        for x in 0..w as isize {
            let c = at(x, y);
            let lx = 2.0 * c - at(x - 1, y) - at(x + 1, y);
            let ly = 2.0 * c - at(x, y - 1) - at(x, y + 1);
            let d1 = at(x + 1, y - 1) + at(x - 1, y + 1) - 2.0 * c;
            let d2 = at(x - 1, y - 1) + at(x + 1, y + 1) - 2.0 * c;
            total += lx.abs() + ly.abs() + (d1.abs() + d2.abs()) / 2f64.sqrt();
        }
    }
    total / (w * h) as f64
}

/// Global contrast factor by an independent route: explicit 4-neighbour
/// lists and block averaging.
pub fn brute_gcf(img: &RasterImage) -> f64 {
    let (w, h) = (img.width(), img.height());
    let rgb = rgb_grids(img);
    let mut g: Grid = (0..h)
        .map(|y| (0..w).map(|x| 0.299 * rgb[0][y][x] + 0.587 * rgb[1][y][x] + 0.114 * rgb[2][y][x]).collect())
        .collect();
    let mut out = 0.0;
    for i in 1..=9 {
        let (hh, ww) = (g.len(), g[0].len());
        let lum: Grid = g.iter().map(|r| r.iter().map(|&k| 100.0 * k.powf(1.1)).collect()).collect();
        let mut lc = 0.0;
        for y in 0..hh {
            for x in 0..ww {
                let mut nb = Vec::new();
                if x > 0 {
                    nb.push(lum[y][x - 1]);
                }
                if x + 1 < ww {
                    nb.push(lum[y][x + 1]);
                }
                if y > 0 {
                    nb.push(lum[y - 1][x]);
                }
                if y + 1 < hh {
                    nb.push(lum[y + 1][x]);
                }
                if !nb.is_empty() {
                    lc += nb.iter().map(|v| (lum[y][x] - v).abs()).sum::<f64>() / nb.len() as f64;
                }
            }
        }
        lc /= (ww * hh) as f64;
        let f = i as f64 / 9.0;
        out += (-0.406385 * f * f + 0.334573 * f + 0.0877526) * lc;
        let (nh, nw) = ((hh / 2).max(1), (ww / 2).max(1));
        g = (0..nh)
            .map(|y| {
                (0..nw)
                    .map(|x| {
                        let y1 = (2 * y + 1).min(hh - 1);
                        let x1 = (2 * x + 1).min(ww - 1);
                        (g[2 * y][2 * x] + g[2 * y][x1] + g[y1][2 * x] + g[y1][x1]) / 4.0
                    })
                    .collect()
            })
            .collect();
    }
    out
}

/// Builds the 50-image demo dataset (40 originals, 5 beautified,
/// 5 uglified) under `root` and returns its manifest.
pub fn demo_dataset(root: &std::path::Path) -> aesthetica::dataset::DatasetManifest {
    use aesthetica::dataset::{ingest, Category, DatasetManifest, MANIFEST_FILE};
    let staging = root.join("staging");
    let layout = aesthetica::demo::prepare_demo(&corpus_dir(), &staging, 1).unwrap();
    let mut manifest = DatasetManifest::new();
    for (dir, cat) in [
        (&layout.original, Category::Original),
        (&layout.beautified, Category::Beautified),
        (&layout.uglified, Category::Uglified),
    ] {
        let report = ingest(&mut manifest, root, dir, cat, "demo").unwrap();
        assert!(report.warnings.is_empty(), "{:?}", report.warnings);
    }
    manifest.save(root.join(MANIFEST_FILE)).unwrap();
    manifest
}
