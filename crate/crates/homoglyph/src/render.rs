//! String rasterization.
//!
//! A name is drawn as white ink on a black background into a fixed 150×12
//! binary image, left to right with natural advance widths. The glyph set is
//! rasterized once into a [`GlyphAtlas`]; rendering a string is then a pure
//! composition of cached height-12 strips, so identical inputs always produce
//! bit-identical images.

use std::collections::HashMap;

use thiserror::Error;

/// Image width in pixels; fits roughly 25 average glyphs.
pub const IMAGE_WIDTH: usize = 150;
/// Image height in pixels; also the atlas strip height.
pub const IMAGE_HEIGHT: usize = 12;
/// Fixed left margin before the first glyph.
pub const LEFT_MARGIN: usize = 1;
/// Nominal glyph budget used by truncating callers.
pub const MAX_GLYPHS: usize = 25;

#[derive(Debug, Error)]
pub enum RenderError {
    #[error("string is empty after stripping trailing whitespace")]
    EmptyString,
    #[error("string {0:?} renders wider than {IMAGE_WIDTH} px")]
    StringTooLong(String),
    #[error("font data could not be parsed: {0}")]
    BadFont(String),
    #[error("font has no usable line metrics")]
    BadFontMetrics,
}

/// A rasterized glyph: a binary strip of height [`IMAGE_HEIGHT`] with the
/// baseline already applied, plus the integer advance used for layout.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GlyphBitmap {
    width: usize,
    advance: usize,
    /// `width * IMAGE_HEIGHT` values in `{0,1}`, row-major.
    pixels: Vec<u8>,
}

impl GlyphBitmap {
    pub fn width(&self) -> usize {
        self.width
    }

    pub fn advance(&self) -> usize {
        self.advance
    }

    pub fn pixels(&self) -> &[u8] {
        &self.pixels
    }

    pub fn get(&self, x: usize, y: usize) -> u8 {
        self.pixels[y * self.width + x]
    }

    fn ink(&self) -> usize {
        self.pixels.iter().map(|&p| p as usize).sum()
    }
}

/// Immutable per-codepoint bitmap cache for one font face at the pinned
/// pixel height. Lookup never mutates, so a shared atlas can serve
/// concurrent renders.
pub struct GlyphAtlas {
    font_id: String,
    font_checksum: String,
    px_size: f32,
    baseline_row: i32,
    glyphs: HashMap<char, GlyphBitmap>,
    fallback: GlyphBitmap,
}

impl GlyphAtlas {
    /// Atlas over the bundled font covering printable ASCII plus every
    /// codepoint appearing in the bundled confusable table.
    pub fn bundled() -> GlyphAtlas {
        GlyphAtlas::from_font_bytes(crate::BUNDLED_FONT_ID, crate::BUNDLED_FONT, default_charset())
            .expect("bundled font is valid")
    }

    /// Builds an atlas from raw TrueType bytes, caching a bitmap for every
    /// charset codepoint the face supports. Codepoints outside the charset
    /// (or missing from the face) render as the fallback glyph.
    pub fn from_font_bytes(
        font_id: &str,
        bytes: &[u8],
        charset: impl IntoIterator<Item = char>,
    ) -> Result<GlyphAtlas, RenderError> {
        let font = fontdue::Font::from_bytes(bytes, fontdue::FontSettings::default())
            .map_err(|e| RenderError::BadFont(e.to_string()))?;

        // Scale the face so ascent plus descent spans exactly the strip
        // height, then fix the baseline row. Line metrics are linear in the
        // pixel size.
        let probe = font
            .horizontal_line_metrics(IMAGE_HEIGHT as f32)
            .ok_or(RenderError::BadFontMetrics)?;
        let px_size = (IMAGE_HEIGHT as f32) * (IMAGE_HEIGHT as f32) / (probe.ascent - probe.descent);
        let metrics = font
            .horizontal_line_metrics(px_size)
            .ok_or(RenderError::BadFontMetrics)?;
        let baseline_row = metrics.ascent.floor() as i32;

        let mut glyphs = HashMap::new();
        for ch in charset {
            if font.lookup_glyph_index(ch) == 0 {
                continue;
            }
            let (m, coverage) = font.rasterize(ch, px_size);
            glyphs.insert(ch, compose_strip(&m, &coverage, baseline_row));
        }

        let (m0, cov0) = font.rasterize_indexed(0, px_size);
        let mut fallback = compose_strip(&m0, &cov0, baseline_row);
        if fallback.ink() == 0 {
            fallback = box_glyph();
        }

        Ok(GlyphAtlas {
            font_id: font_id.to_string(),
            font_checksum: crate::sha256_hex(bytes),
            px_size,
            baseline_row,
            glyphs,
            fallback,
        })
    }

    pub fn font_id(&self) -> &str {
        &self.font_id
    }

    /// SHA-256 of the font file this atlas was built from.
    pub fn font_checksum(&self) -> &str {
        &self.font_checksum
    }

    pub fn px_size(&self) -> f32 {
        self.px_size
    }

    pub fn baseline_row(&self) -> i32 {
        self.baseline_row
    }

    pub fn glyph_px_height(&self) -> usize {
        IMAGE_HEIGHT
    }

    /// Cached bitmap for a codepoint, if it is in the atlas.
    pub fn glyph(&self, ch: char) -> Option<&GlyphBitmap> {
        self.glyphs.get(&ch)
    }

    pub fn fallback_glyph(&self) -> &GlyphBitmap {
        &self.fallback
    }

    pub fn supports(&self, ch: char) -> bool {
        self.glyphs.contains_key(&ch)
    }

    fn glyph_or_fallback(&self, ch: char) -> (&GlyphBitmap, bool) {
        match self.glyphs.get(&ch) {
            Some(g) => (g, false),
            None => (&self.fallback, true),
        }
    }

    /// Layout width of `s` in pixels (margin included), using the fallback
    /// advance for unsupported codepoints.
    pub fn advance_of(&self, s: &str) -> usize {
        LEFT_MARGIN
            + s.chars()
                .map(|ch| self.glyph_or_fallback(ch).0.advance())
                .sum::<usize>()
    }

    /// Whether `s` lays out within the image width, every glyph included.
    pub fn fits(&self, s: &str) -> bool {
        let mut pen = LEFT_MARGIN;
        for ch in s.chars() {
            let (glyph, _) = self.glyph_or_fallback(ch);
            if pen + glyph.width().max(glyph.advance()) > IMAGE_WIDTH {
                return false;
            }
            pen += glyph.advance();
        }
        true
    }
}

/// A 150×12 binary raster of a string: background 0, ink 1.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RenderedImage {
    pixels: Vec<u8>,
    used_fallback: bool,
}

impl RenderedImage {
    pub fn width(&self) -> usize {
        IMAGE_WIDTH
    }

    pub fn height(&self) -> usize {
        IMAGE_HEIGHT
    }

    /// Row-major `{0,1}` pixel values, `IMAGE_WIDTH * IMAGE_HEIGHT` entries.
    pub fn pixels(&self) -> &[u8] {
        &self.pixels
    }

    pub fn get(&self, x: usize, y: usize) -> u8 {
        self.pixels[y * IMAGE_WIDTH + x]
    }

    /// True when at least one codepoint was drawn with the fallback glyph.
    pub fn used_fallback(&self) -> bool {
        self.used_fallback
    }

    /// Number of pixels that differ from `other`.
    pub fn hamming_distance(&self, other: &RenderedImage) -> usize {
        self.pixels
            .iter()
            .zip(&other.pixels)
            .filter(|(a, b)| a != b)
            .count()
    }

    /// Plain-text PBM (P1) dump for visual inspection.
    pub fn to_pbm(&self) -> String {
        let mut out = format!("P1\n{IMAGE_WIDTH} {IMAGE_HEIGHT}\n");
        for y in 0..IMAGE_HEIGHT {
            for x in 0..IMAGE_WIDTH {
                if x > 0 {
                    out.push(' ');
                }
                out.push(if self.get(x, y) == 1 { '1' } else { '0' });
            }
            out.push('\n');
        }
        out
    }
}

/// Rasterizes `s` into a fixed-size binary image.
///
/// Trailing whitespace is stripped first. Unsupported codepoints draw the
/// fallback glyph and set the image's fallback flag; a string whose layout
/// exceeds the image width is an error, signalling the caller to truncate
/// or reject.
pub fn render_string(s: &str, atlas: &GlyphAtlas) -> Result<RenderedImage, RenderError> {
    let s = s.trim_end();
    if s.is_empty() {
        return Err(RenderError::EmptyString);
    }
    let mut pixels = vec![0u8; IMAGE_WIDTH * IMAGE_HEIGHT];
    let mut used_fallback = false;
    let mut pen = LEFT_MARGIN;
    for ch in s.chars() {
        let (glyph, is_fallback) = atlas.glyph_or_fallback(ch);
        used_fallback |= is_fallback;
        if pen + glyph.width().max(glyph.advance()) > IMAGE_WIDTH {
            return Err(RenderError::StringTooLong(s.to_string()));
        }
        for y in 0..IMAGE_HEIGHT {
            for x in 0..glyph.width() {
                if glyph.get(x, y) == 1 {
                    pixels[y * IMAGE_WIDTH + pen + x] = 1;
                }
            }
        }
        pen += glyph.advance();
    }
    Ok(RenderedImage {
        pixels,
        used_fallback,
    })
}

/// Renders the longest prefix of `s` (at most [`MAX_GLYPHS`] codepoints)
/// that fits in the image, reporting whether anything was dropped. This is
/// the truncation policy used by the CLI; the library's [`render_string`]
/// errors instead.
pub fn render_truncated(
    s: &str,
    atlas: &GlyphAtlas,
) -> Result<(RenderedImage, bool), RenderError> {
    let s = s.trim_end();
    if s.is_empty() {
        return Err(RenderError::EmptyString);
    }
    let mut kept = 0usize;
    let mut pen = LEFT_MARGIN;
    for ch in s.chars().take(MAX_GLYPHS) {
        let (glyph, _) = atlas.glyph_or_fallback(ch);
        if pen + glyph.width().max(glyph.advance()) > IMAGE_WIDTH {
            break;
        }
        pen += glyph.advance();
        kept += 1;
    }
    if kept == 0 {
        return Err(RenderError::StringTooLong(s.to_string()));
    }
    let prefix: String = s.chars().take(kept).collect();
    let truncated = kept < s.chars().count();
    let image = render_string(&prefix, atlas)?;
    Ok((image, truncated))
}

/// Printable ASCII plus every codepoint of the bundled confusable table.
pub fn default_charset() -> impl Iterator<Item = char> {
    let ascii = (0x20u32..=0x7e).map(|c| char::from_u32(c).unwrap());
    let table_chars: Vec<char> = crate::BUNDLED_CONFUSABLES_TSV
        .chars()
        .filter(|c| !c.is_ascii())
        .collect();
    ascii.chain(table_chars)
}

/// Folds a fontdue coverage bitmap into a height-12 binary strip with the
/// baseline applied. Anti-aliased coverage is thresholded at one half.
/// Negative left bearings are clamped so a glyph never paints left of its
/// pen position, which keeps rendering monotone under appends.
fn compose_strip(m: &fontdue::Metrics, coverage: &[u8], baseline_row: i32) -> GlyphBitmap {
    let advance = m.advance_width.round().max(0.0) as usize;
    let x0 = m.xmin.max(0);
    let width = advance.max((x0 + m.width as i32) as usize).max(1);
    let mut pixels = vec![0u8; width * IMAGE_HEIGHT];
    let top = baseline_row - (m.ymin + m.height as i32);
    for gy in 0..m.height {
        let iy = top + gy as i32;
        if iy < 0 || iy >= IMAGE_HEIGHT as i32 {
            continue;
        }
        for gx in 0..m.width {
            if coverage[gy * m.width + gx] >= 128 {
                let ix = (x0 + gx as i32) as usize;
                if ix < width {
                    pixels[iy as usize * width + ix] = 1;
                }
            }
        }
    }
    GlyphBitmap {
        width,
        advance: advance.max(1),
        pixels,
    }
}

/// Hollow box used when the face has no visible .notdef glyph.
fn box_glyph() -> GlyphBitmap {
    let width = 6;
    let mut pixels = vec![0u8; width * IMAGE_HEIGHT];
    for y in 1..10 {
        for x in 0..width {
            let edge = y == 1 || y == 9 || x == 0 || x == width - 1;
            if edge {
                pixels[y * width + x] = 1;
            }
        }
    }
    GlyphBitmap {
        width,
        advance: width + 1,
        pixels,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn atlas() -> GlyphAtlas {
        GlyphAtlas::bundled()
    }

    #[test]
    fn image_dimensions_fixed() {
        let img = render_string("a", &atlas()).unwrap();
        assert_eq!(img.width(), 150);
        assert_eq!(img.height(), 12);
        assert_eq!(img.pixels().len(), 150 * 12);
    }

    #[test]
    fn pixels_are_binary_and_nonempty() {
        let img = render_string("svchost.exe", &atlas()).unwrap();
        assert!(img.pixels().iter().all(|&p| p == 0 || p == 1));
        assert!(img.pixels().iter().any(|&p| p == 1));
    }

    #[test]
    fn rendering_is_deterministic() {
        let atlas = atlas();
        let a = render_string("google.com", &atlas).unwrap();
        let b = render_string("google.com", &atlas).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn deterministic_across_atlas_builds() {
        let a = render_string("LSASS.EXE", &GlyphAtlas::bundled()).unwrap();
        let b = render_string("LSASS.EXE", &GlyphAtlas::bundled()).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn empty_string_rejected() {
        assert!(matches!(
            render_string("", &atlas()),
            Err(RenderError::EmptyString)
        ));
        assert!(matches!(
            render_string("   ", &atlas()),
            Err(RenderError::EmptyString)
        ));
    }

    #[test]
    fn overlong_string_rejected() {
        let wide = "W".repeat(26);
        assert!(matches!(
            render_string(&wide, &atlas()),
            Err(RenderError::StringTooLong(_))
        ));
    }

    #[test]
    fn narrow_string_of_many_glyphs_fits() {
        // The 150 px budget is the real constraint, not the glyph count.
        let narrow = "l".repeat(40);
        assert!(render_string(&narrow, &atlas()).is_ok());
    }

    #[test]
    fn truncation_keeps_longest_fitting_prefix() {
        let atlas = atlas();
        let wide = "W".repeat(40);
        let (img, truncated) = render_truncated(&wide, &atlas).unwrap();
        assert!(truncated);
        assert!(img.pixels().iter().any(|&p| p == 1));
        let (_, untruncated) = render_truncated("svchost.exe", &atlas).unwrap();
        assert!(!untruncated);
    }

    #[test]
    fn truncation_caps_glyph_count() {
        let atlas = atlas();
        let narrow = "l".repeat(40);
        let (img, truncated) = render_truncated(&narrow, &atlas).unwrap();
        assert!(truncated);
        let capped: String = narrow.chars().take(MAX_GLYPHS).collect();
        assert_eq!(img, render_string(&capped, &atlas).unwrap());
    }

    #[test]
    fn unsupported_codepoint_uses_fallback_with_warning() {
        let atlas = atlas();
        let img = render_string("a\u{4e2d}b", &atlas).unwrap();
        assert!(img.used_fallback());
        let clean = render_string("ab", &atlas).unwrap();
        assert!(!clean.used_fallback());
    }

    #[test]
    fn near_confusable_pixel_distance() {
        // Regression constant measured on the pinned font: the stroke of the
        // barred l adds exactly two ink pixels at this size.
        let atlas = atlas();
        let plain = render_string("l", &atlas).unwrap();
        let barred = render_string("\u{142}", &atlas).unwrap();
        let distance = plain.hamming_distance(&barred);
        assert_eq!(distance, 2);
        assert!((1..=12).contains(&distance));
    }

    #[test]
    fn identical_cyrillic_shapes_render_identically() {
        let atlas = atlas();
        let latin = render_string("o", &atlas).unwrap();
        let cyrillic = render_string("\u{43e}", &atlas).unwrap();
        assert_eq!(latin.pixels(), cyrillic.pixels());
    }

    #[test]
    fn atlas_strips_have_fixed_height() {
        let atlas = atlas();
        for ch in default_charset() {
            if let Some(glyph) = atlas.glyph(ch) {
                assert_eq!(glyph.pixels().len(), glyph.width() * IMAGE_HEIGHT);
                assert!(glyph.advance() >= 1);
            }
        }
    }

    #[test]
    fn monotone_ink_under_append() {
        let atlas = atlas();
        let base = "svchost";
        let prefix_advance = atlas.advance_of(base);
        let short = render_string(base, &atlas).unwrap();
        let long = render_string("svchostj", &atlas).unwrap();
        for y in 0..IMAGE_HEIGHT {
            for x in 0..prefix_advance {
                assert_eq!(short.get(x, y), long.get(x, y), "pixel ({x},{y}) changed");
            }
        }
    }

    #[test]
    fn pbm_dump_shape() {
        let pbm = render_string("ab", &atlas()).unwrap().to_pbm();
        let mut lines = pbm.lines();
        assert_eq!(lines.next(), Some("P1"));
        assert_eq!(lines.next(), Some("150 12"));
        assert_eq!(lines.count(), IMAGE_HEIGHT);
    }

    #[test]
    fn fallback_glyph_has_ink() {
        assert!(atlas().fallback_glyph().ink() > 0);
    }

    #[test]
    fn random_strings_render_identically_twice() {
        use rand::{Rng, SeedableRng};
        let atlas = atlas();
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        let alphabet: Vec<char> = "abcdefghijklmnopqrstuvwxyz0123456789.-_".chars().collect();
        for _ in 0..1000 {
            let len = rng.gen_range(1..=20);
            let s: String = (0..len)
                .map(|_| alphabet[rng.gen_range(0..alphabet.len())])
                .collect();
            let a = render_string(&s, &atlas).unwrap();
            let b = render_string(&s, &atlas).unwrap();
            assert_eq!(a, b);
        }
    }
}
