/// Formats a float with 17 significant digits, enough to reproduce the
/// exact bit pattern when parsed back.
pub fn f64_17(x: f64) -> String {
    format!("{x:.16e}")
}
