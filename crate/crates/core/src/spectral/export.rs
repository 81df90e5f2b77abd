//! Text and binary export of eigensystems.
//!
//! Binary layout, all little-endian:
//!
//! | bytes | content |
//! |-------|---------|
//! | 8     | magic `USEIGEN1` |
//! | 4     | kind (`0` Dirichlet, `1` Neumann), u32 |
//! | 4     | dimension, u32 |
//! | 4     | nodes along x, u32 |
//! | 4     | nodes along y (1 in 1-D), u32 |
//! | 4     | mode count N, u32 |
//! | 8·dim·2 | axis bounds `lo, hi` per axis, f64 |
//! | per mode | `λ_n` then one f64 per grid node (x fastest) |

use std::fmt::Write as _;

use super::assemble::BoundaryKind;
use super::eigen::EigenSystem;

pub const MAGIC: &[u8; 8] = b"USEIGEN1";

impl EigenSystem {
    pub fn to_text(&self) -> String {
        let (nx, ny) = self.grid.shape();
        let mut s = String::new();
        let _ = writeln!(s, "# kind {} method {}", self.kind.name(), self.method.name());
        let _ = writeln!(s, "# modes {} shape {} {}", self.mode_count(), nx, ny);
        for a in self.grid.axes() {
            let _ = writeln!(s, "# axis {} {}", a.lo, a.hi);
        }
        for (n, (lam, v)) in self.eigenvalues.iter().zip(&self.vectors).enumerate() {
            let _ = writeln!(s, "mode {} {}", n + 1, lam);
            let line: Vec<String> = v.iter().map(|x| x.to_string()).collect();
            let _ = writeln!(s, "{}", line.join(" "));
        }
        s
    }

    pub fn to_bytes(&self) -> Vec<u8> {
        let (nx, ny) = self.grid.shape();
        let mut out = Vec::with_capacity(32 + 8 * self.mode_count() * (1 + nx * ny));
        out.extend_from_slice(MAGIC);
        let kind = match self.kind {
            BoundaryKind::Dirichlet => 0u32,
            BoundaryKind::Neumann => 1u32,
        };
        for v in [kind, self.grid.dimension() as u32, nx as u32, ny as u32, self.mode_count() as u32] {
            out.extend_from_slice(&v.to_le_bytes());
        }
        for a in self.grid.axes() {
            out.extend_from_slice(&a.lo.to_le_bytes());
            out.extend_from_slice(&a.hi.to_le_bytes());
        }
        for (lam, v) in self.eigenvalues.iter().zip(&self.vectors) {
            out.extend_from_slice(&lam.to_le_bytes());
            for x in v {
                out.extend_from_slice(&x.to_le_bytes());
            }
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use crate::spectral::*;

    #[test]
    fn binary_layout() {
        let g = SpatialGrid::interval(0.0, 1.0, 16).unwrap();
        let eig = eigensystem(&g, &Potential::zero(&g), BoundaryKind::Dirichlet, 3, EigenMethod::FiniteDifference).unwrap();
        let b = eig.to_bytes();
        assert_eq!(&b[..8], super::MAGIC);
        assert_eq!(b.len(), 8 + 20 + 16 + 3 * 8 * (1 + 18));
        let lam = f64::from_le_bytes(b[44..52].try_into().unwrap());
        assert_eq!(lam, eig.eigenvalues[0]);
        let text = eig.to_text();
        assert_eq!(text.lines().filter(|l| l.starts_with("mode")).count(), 3);
    }
}
