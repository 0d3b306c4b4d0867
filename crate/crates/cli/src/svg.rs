//! SVG rendering. The y axis is flipped so larger y is drawn higher up.

use std::collections::BTreeSet;
use std::fmt::Write;

use nucleus_core::clusters::NucleusCluster;
use nucleus_core::geom::{Point2, Tessellation};

const SIZE: f64 = 800.0;
const NUCLEUS_FILL: &str = "#d1495b";
const MEMBER_FILL: &str = "#f2c4b0";
const PLAIN_FILL: &str = "#ffffff";

/// Regions, shared edges and sites. Nuclei of `maximal` clusters are filled
/// and their members tinted.
pub fn render(t: &Tessellation, maximal: &[NucleusCluster]) -> String {
    let bbox = t.bbox();
    let scale = SIZE / bbox.extent();
    let (w, h) = (bbox.width() * scale, bbox.height() * scale);
    let map = |p: Point2| ((p.x - bbox.min().x) * scale, (bbox.max().y - p.y) * scale);

    let nuclei: BTreeSet<usize> = maximal.iter().map(|c| c.nucleus()).collect();
    let members: BTreeSet<usize> = maximal
        .iter()
        .flat_map(|c| c.members().iter().copied())
        .collect();

    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{w:.2}" height="{h:.2}" viewBox="0 0 {w:.2} {h:.2}">"#
    );
    let _ = writeln!(
        s,
        r##"<rect x="0" y="0" width="{w:.2}" height="{h:.2}" fill="#fafafa" stroke="#333333"/>"##
    );
    let _ = writeln!(s, r##"<g stroke="#999999" stroke-width="0.5">"##);
    for (i, r) in t.regions().iter().enumerate() {
        let fill = if nuclei.contains(&i) {
            NUCLEUS_FILL
        } else if members.contains(&i) {
            MEMBER_FILL
        } else {
            PLAIN_FILL
        };
        let pts: Vec<String> = r
            .vertices()
            .iter()
            .map(|&p| {
                let (x, y) = map(p);
                format!("{x:.3},{y:.3}")
            })
            .collect();
        let _ = writeln!(
            s,
            r#"<polygon data-region="{i}" fill="{fill}" points="{}"/>"#,
            pts.join(" ")
        );
    }
    let _ = writeln!(s, "</g>");
    let _ = writeln!(s, r##"<g stroke="#1d3557" stroke-width="1">"##);
    for (a, b, n) in t.adjacency_pairs() {
        let (x1, y1) = map(n.segment[0]);
        let (x2, y2) = map(n.segment[1]);
        let _ = writeln!(
            s,
            r#"<line data-a="{a}" data-b="{b}" x1="{x1:.3}" y1="{y1:.3}" x2="{x2:.3}" y2="{y2:.3}"/>"#
        );
    }
    let _ = writeln!(s, "</g>");
    let _ = writeln!(s, r##"<g fill="#000000">"##);
    for &p in t.sites() {
        let (x, y) = map(p);
        let _ = writeln!(s, r#"<circle cx="{x:.3}" cy="{y:.3}" r="2"/>"#);
    }
    let _ = writeln!(s, "</g>");
    s.push_str("</svg>\n");
    s
}
