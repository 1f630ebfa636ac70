//! Minimal SVG line chart of mean receiver information over time.

use std::fmt::Write;

use urnsig_core::{AggregateRow, Phase};

const WIDTH: f64 = 720.0;
const HEIGHT: f64 = 420.0;
const LEFT: f64 = 70.0;
const RIGHT: f64 = 20.0;
const TOP: f64 = 40.0;
const BOTTOM: f64 = 60.0;
const Y_TICKS: usize = 5;
const X_TICKS: usize = 5;

/// One polyline through the batch means; a dashed marker at each event turn.
/// Output depends only on the inputs, so identical batches give identical files.
pub fn receiver_info_svg(title: &str, rows: &[AggregateRow], event_turns: &[u64]) -> String {
    let max_turn = rows.iter().map(|r| r.turn).max().unwrap_or(1).max(1) as f64;
    let max_bits = rows
        .iter()
        .map(|r| r.receiver_info_bits.mean)
        .fold(0.0_f64, f64::max);
    // Round the vertical range up to the next half bit.
    let y_max = ((max_bits * 2.0).ceil() / 2.0).max(0.5);
    let plot_w = WIDTH - LEFT - RIGHT;
    let plot_h = HEIGHT - TOP - BOTTOM;
    let x = |turn: f64| LEFT + plot_w * turn / max_turn;
    let y = |bits: f64| TOP + plot_h * (1.0 - bits / y_max);

    let mut s = String::new();
    let w = &mut s;
    let _ = writeln!(
        w,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}" font-family="sans-serif" font-size="12">"#
    );
    let _ = writeln!(w, r#"<rect width="{WIDTH}" height="{HEIGHT}" fill="white"/>"#);
    let _ = writeln!(
        w,
        r#"<text x="{}" y="20" text-anchor="middle" font-size="14">{}</text>"#,
        WIDTH / 2.0,
        escape(title)
    );

    for i in 0..=Y_TICKS {
        let bits = y_max * i as f64 / Y_TICKS as f64;
        let py = y(bits);
        let _ = writeln!(
            w,
            r##"<line x1="{LEFT}" y1="{py:.2}" x2="{:.2}" y2="{py:.2}" stroke="#ddd"/>"##,
            LEFT + plot_w
        );
        let _ = writeln!(
            w,
            r#"<text x="{:.2}" y="{:.2}" text-anchor="end">{bits:.2}</text>"#,
            LEFT - 6.0,
            py + 4.0
        );
    }
    for i in 0..=X_TICKS {
        let turn = max_turn * i as f64 / X_TICKS as f64;
        let _ = writeln!(
            w,
            r#"<text x="{:.2}" y="{:.2}" text-anchor="middle">{}</text>"#,
            x(turn),
            TOP + plot_h + 18.0,
            turn.round() as u64
        );
    }
    let _ = writeln!(
        w,
        r#"<rect x="{LEFT}" y="{TOP}" width="{plot_w}" height="{plot_h}" fill="none" stroke="black"/>"#
    );
    let _ = writeln!(
        w,
        r#"<text x="{:.2}" y="{:.2}" text-anchor="middle">turns</text>"#,
        LEFT + plot_w / 2.0,
        HEIGHT - 15.0
    );
    let _ = writeln!(
        w,
        r#"<text x="18" y="{:.2}" text-anchor="middle" transform="rotate(-90 18 {:.2})">receiver information (bits)</text>"#,
        TOP + plot_h / 2.0,
        TOP + plot_h / 2.0
    );

    for &turn in event_turns {
        let px = x(turn as f64);
        let _ = writeln!(
            w,
            r#"<line x1="{px:.2}" y1="{TOP}" x2="{px:.2}" y2="{:.2}" stroke="red" stroke-dasharray="6 4"/>"#,
            TOP + plot_h
        );
    }

    let points: Vec<String> = rows
        .iter()
        .filter(|r| r.phase != Phase::Regular || !event_turns.contains(&r.turn))
        .map(|r| format!("{:.2},{:.2}", x(r.turn as f64), y(r.receiver_info_bits.mean)))
        .collect();
    let _ = writeln!(
        w,
        r#"<polyline fill="none" stroke="steelblue" stroke-width="1.5" points="{}"/>"#,
        points.join(" ")
    );
    s.push_str("</svg>\n");
    s
}

fn escape(text: &str) -> String {
    text.replace('&', "&amp;")
        .replace('<', "&lt;")
        .replace('>', "&gt;")
}
