//! Text and SVG pictures of colourings.
//!
//! Colours 0–3 are drawn black, white, red and yellow.

use std::fmt::Write;

use crate::colouring::Colouring;

const LETTERS: [char; 4] = ['B', 'W', 'R', 'Y'];
const FILLS: [&str; 4] = ["#000000", "#ffffff", "#d62728", "#ffd700"];

/// One line per lattice row; retained couplings drawn as `-` and `|`.
pub fn ascii(colouring: &Colouring) -> String {
    let (rows, cols) = (colouring.rows, colouring.cols);
    let edges = colouring.retained_edges();
    let mut out = String::new();
    for r in 0..rows {
        for c in 0..cols {
            let q = r * cols + c;
            out.push(LETTERS[colouring.colour(q) as usize]);
            if c + 1 < cols {
                out.push_str(if edges.contains(&crate::lattice::Pair(q, q + 1)) {
                    "-"
                } else {
                    " "
                });
            }
        }
        out.push('\n');
        if r + 1 < rows {
            for c in 0..cols {
                let q = r * cols + c;
                out.push(if edges.contains(&crate::lattice::Pair(q, q + cols)) {
                    '|'
                } else {
                    ' '
                });
                if c + 1 < cols {
                    out.push(' ');
                }
            }
            out.push('\n');
        }
    }
    out
}

pub fn svg(colouring: &Colouring) -> String {
    const CELL: usize = 40;
    const RADIUS: usize = 12;
    let (rows, cols) = (colouring.rows, colouring.cols);
    let (w, h) = (cols * CELL, rows * CELL);
    let centre = |q: usize| ((q % cols) * CELL + CELL / 2, (q / cols) * CELL + CELL / 2);

    let mut out = String::new();
    let _ = writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{w}" height="{h}" viewBox="0 0 {w} {h}">"#
    );
    let _ = writeln!(out, r##"<rect width="{w}" height="{h}" fill="#9e9e9e"/>"##);
    for p in colouring.retained_edges() {
        let ((x1, y1), (x2, y2)) = (centre(p.0), centre(p.1));
        let _ = writeln!(
            out,
            r##"<line x1="{x1}" y1="{y1}" x2="{x2}" y2="{y2}" stroke="#1f4e9e" stroke-width="4"/>"##
        );
    }
    for q in 0..colouring.n_qubits() {
        let (x, y) = centre(q);
        let fill = FILLS[colouring.colour(q) as usize];
        let _ = writeln!(
            out,
            r##"<circle cx="{x}" cy="{y}" r="{RADIUS}" fill="{fill}" stroke="#000000" stroke-width="1"><title>qubit {q}</title></circle>"##
        );
    }
    out.push_str("</svg>\n");
    out
}
