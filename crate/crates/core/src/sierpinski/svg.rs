//! Stereographic drawings of peripheral circles, one layer per stage.

use std::fmt::Write as _;

use super::SierpinskiApprox;
use crate::sphere;

const COLORS: [&str; 6] = ["#1b6ca8", "#d1495b", "#2e8b57", "#edae49", "#6a4c93", "#444444"];

/// Layer `n` holds every retained circle as it stood after stage `n`, drawn
/// on the square `[−half_width, half_width]²` of the plane.
pub fn render_strata_svg(s: &SierpinskiApprox, half_width: f64, pixels: u32) -> String {
    let w = half_width;
    let mut out = String::new();
    writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{pixels}" height="{pixels}" viewBox="{:.6} {:.6} {:.6} {:.6}">"#,
        -w,
        -w,
        2.0 * w,
        2.0 * w
    )
    .unwrap();
    writeln!(out, r#"<rect x="{:.6}" y="{:.6}" width="{:.6}" height="{:.6}" fill="white"/>"#, -w, -w, 2.0 * w, 2.0 * w).unwrap();
    let stroke = 2.0 * w / pixels as f64;
    for n in 0..s.depth() {
        writeln!(
            out,
            r#"<g id="stage-{}" fill="none" stroke="{}" stroke-width="{stroke:.6}">"#,
            n + 1,
            COLORS[n % COLORS.len()]
        )
        .unwrap();
        for d in &s.excluded {
            let Some(snap) = s.peripherals[d.circle].snapshots.get(n) else { continue };
            let Some(zs) = snap.iter().map(sphere::to_complex).collect::<Option<Vec<_>>>() else { continue };
            let (lo, hi) = zs.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), z| (lo.min(z.re.min(z.im)), hi.max(z.re.max(z.im))));
            if lo > w || hi < -w {
                continue;
            }
            out.push_str("<path d=\"");
            for (k, z) in zs.iter().enumerate() {
                write!(out, "{}{:.6} {:.6}", if k == 0 { 'M' } else { 'L' }, z.re, -z.im).unwrap();
            }
            out.push_str("Z\"/>\n");
        }
        out.push_str("</g>\n");
    }
    out.push_str("</svg>\n");
    out
}
