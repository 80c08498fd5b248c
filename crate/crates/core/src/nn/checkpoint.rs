//! Plain-text parameter format.
//!
//! ```text
//! mlp v1
//! hidden relu|tanh
//! output identity | output scaled_tanh <scale>
//! layers <count>
//! layer <out> <in>
//! <out lines of <in> weights, row-major>
//! <one line of <out> biases>
//! ...
//! ```
//!
//! Values use Rust's shortest round-trip float formatting, so a written
//! network reads back bit-identical.

use std::fmt::Write as _;

use ndarray::{Array1, Array2};

use super::mlp::{Activation, Dense, Mlp, OutputActivation};
use crate::error::{Error, Result};

pub fn write_mlp(net: &Mlp, out: &mut String) {
    let _ = writeln!(out, "mlp v1");
    let _ = writeln!(out, "hidden {}", net.hidden_activation().name());
    match net.output_activation() {
        OutputActivation::Identity => {
            let _ = writeln!(out, "output identity");
        }
        OutputActivation::ScaledTanh(s) => {
            let _ = writeln!(out, "output scaled_tanh {s}");
        }
    }
    let _ = writeln!(out, "layers {}", net.layers().len());
    for layer in net.layers() {
        let _ = writeln!(out, "layer {} {}", layer.output_dim(), layer.input_dim());
        for row in layer.weights.rows() {
            push_row(out, row.iter());
        }
        push_row(out, layer.bias.iter());
    }
}

fn push_row<'a>(out: &mut String, values: impl Iterator<Item = &'a f64>) {
    let mut first = true;
    for v in values {
        if !first {
            out.push(' ');
        }
        let _ = write!(out, "{v}");
        first = false;
    }
    out.push('\n');
}

/// Reads one network from `lines`, consuming exactly its lines.
pub fn read_mlp<'a, I>(lines: &mut I) -> Result<Mlp>
where
    I: Iterator<Item = &'a str>,
{
    let mut next = || -> Result<&'a str> {
        lines
            .next()
            .map(str::trim)
            .ok_or_else(|| Error::Parse("unexpected end of network block".into()))
    };
    if next()? != "mlp v1" {
        return Err(Error::Parse("expected `mlp v1` header".into()));
    }
    let hidden = match next()?.split_whitespace().collect::<Vec<_>>().as_slice() {
        ["hidden", "relu"] => Activation::Relu,
        ["hidden", "tanh"] => Activation::Tanh,
        other => return Err(Error::Parse(format!("bad hidden activation line {other:?}"))),
    };
    let output = match next()?.split_whitespace().collect::<Vec<_>>().as_slice() {
        ["output", "identity"] => OutputActivation::Identity,
        ["output", "scaled_tanh", s] => OutputActivation::ScaledTanh(parse_f64(s)?),
        other => return Err(Error::Parse(format!("bad output activation line {other:?}"))),
    };
    let count = match next()?.split_whitespace().collect::<Vec<_>>().as_slice() {
        ["layers", n] => parse_usize(n)?,
        other => return Err(Error::Parse(format!("bad layer count line {other:?}"))),
    };
    let mut layers = Vec::with_capacity(count);
    for _ in 0..count {
        let (rows, cols) = match next()?.split_whitespace().collect::<Vec<_>>().as_slice() {
            ["layer", r, c] => (parse_usize(r)?, parse_usize(c)?),
            other => return Err(Error::Parse(format!("bad layer header {other:?}"))),
        };
        let mut weights = Vec::with_capacity(rows * cols);
        for _ in 0..rows {
            let row = parse_row(next()?)?;
            if row.len() != cols {
                return Err(Error::Parse(format!("weight row has {} values, expected {cols}", row.len())));
            }
            weights.extend(row);
        }
        let bias = parse_row(next()?)?;
        if bias.len() != rows {
            return Err(Error::Parse(format!("bias row has {} values, expected {rows}", bias.len())));
        }
        layers.push(Dense {
            weights: Array2::from_shape_vec((rows, cols), weights)
                .map_err(|e| Error::Parse(e.to_string()))?,
            bias: Array1::from_vec(bias),
        });
    }
    Mlp::from_layers(layers, hidden, output)
}

fn parse_row(line: &str) -> Result<Vec<f64>> {
    line.split_whitespace().map(parse_f64).collect()
}

fn parse_f64(s: &str) -> Result<f64> {
    s.parse().map_err(|_| Error::Parse(format!("invalid number `{s}`")))
}

fn parse_usize(s: &str) -> Result<usize> {
    s.parse().map_err(|_| Error::Parse(format!("invalid count `{s}`")))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::seeded;

    #[test]
    fn text_roundtrip_is_exact() {
        let net = Mlp::new(&[3, 7, 5, 2], Activation::Tanh, OutputActivation::ScaledTanh(2.0), &mut seeded(8)).unwrap();
        let mut s = String::new();
        write_mlp(&net, &mut s);
        let back = read_mlp(&mut s.lines()).unwrap();
        assert_eq!(back, net);
    }

    #[test]
    fn truncated_input_is_parse_error() {
        let net = Mlp::new(&[2, 2], Activation::Relu, OutputActivation::Identity, &mut seeded(0)).unwrap();
        let mut s = String::new();
        write_mlp(&net, &mut s);
        let cut: Vec<&str> = s.lines().take(5).collect();
        assert!(matches!(read_mlp(&mut cut.into_iter()), Err(Error::Parse(_))));
    }
}
