use crate::imaging::{ColorSpace, Plane, RasterImage, SeededRandom};

/// Cuts the image into a `grid × grid` lattice of tiles and shuffles them.
/// Trailing rows and columns that do not fill a tile are dropped.
pub fn block_scramble(img: &RasterImage, grid: usize, rng: &mut SeededRandom) -> RasterImage {
    let g = grid;
    assert!(g >= 1 && g <= img.width().min(img.height()), "grid must fit the image");
    let (tw, th) = (img.width() / g, img.height() / g);
    let mut order: Vec<usize> = (0..g * g).collect();
    rng.shuffle(&mut order);
    let planes: Vec<Plane> = img
        .planes()
        .iter()
        .map(|p| {
            Plane::from_fn(tw * g, th * g, |x, y| {
                let src = order[(y / th) * g + x / tw];
                let (sx, sy) = ((src % g) * tw + x % tw, (src / g) * th + y % th);
                p.get(sx, sy)
            })
        })
        .collect();
    RasterImage::new(img.space(), planes).expect("tiles keep invariants")
}

pub fn scramble_rgb(img: &RasterImage, grid: usize, seed: u64) -> RasterImage {
    let mut rng = SeededRandom::new(seed);
    let src = crate::imaging::convert(img, ColorSpace::SrgbUnit).expect("every space converts to sRGB");
    block_scramble(&src, grid, &mut rng)
}
