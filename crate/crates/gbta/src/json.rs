//! Hand-rolled JSON emission with a fixed float format.
//!
//! All numeric output uses 17 significant digits so that every `f64`
//! round-trips exactly and identical inputs produce byte-identical output.

/// 17-significant-digit rendering of a double, valid as a JSON number.
pub fn fmt_f64(x: f64) -> String {
    if x == 0.0 {
        // collapse -0.0
        return "0".to_string();
    }
    format!("{:.16e}", x)
}

pub fn fmt_vec4(v: &[f64; 4]) -> String {
    format!(
        "[{}, {}, {}, {}]",
        fmt_f64(v[0]),
        fmt_f64(v[1]),
        fmt_f64(v[2]),
        fmt_f64(v[3])
    )
}

pub fn fmt_mat4(m: &[[f64; 4]; 4]) -> String {
    let rows: Vec<String> = m.iter().map(fmt_vec4).collect();
    format!("[{}]", rows.join(", "))
}

pub fn fmt_rows(rows: &[Vec<f64>]) -> String {
    let items: Vec<String> = rows
        .iter()
        .map(|r| {
            let cells: Vec<String> = r.iter().map(|&x| fmt_f64(x)).collect();
            format!("[{}]", cells.join(", "))
        })
        .collect();
    format!("[{}]", items.join(", "))
}

pub fn fmt_str(s: &str) -> String {
    let mut out = String::with_capacity(s.len() + 2);
    out.push('"');
    for ch in s.chars() {
        match ch {
            '"' => out.push_str("\\\""),
            '\\' => out.push_str("\\\\"),
            '\n' => out.push_str("\\n"),
            c if (c as u32) < 0x20 => out.push_str(&format!("\\u{:04x}", c as u32)),
            c => out.push(c),
        }
    }
    out.push('"');
    out
}
