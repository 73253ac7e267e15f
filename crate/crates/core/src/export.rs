//! Tables and meshes for plotting: profile tables, meridian curves, surfaces
//! of revolution as OBJ, and α-sweeps.

use std::f64::consts::PI;
use std::io::Write;

use rayon::prelude::*;
use serde::Serialize;

use crate::catenoid::{total_curvature, CatenoidFamily};
use crate::error::{Error, Result};
use crate::jacobi::{alpha_jacobi_field, criticality_indicator, first_zero};
use crate::profile::profile;
use crate::spectrum::{morse_index, IndexOptions, IndexStatus};

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ProfileRow {
    pub r: f64,
    pub phi: f64,
    pub dphi: f64,
}

/// `count` rows on `(1, r_max]`, uniform in `sqrt(r - 1)` so the square-root
/// behaviour at `r = 1` is resolved.
pub fn profile_table(n: usize, r_max: f64, count: usize) -> Result<Vec<ProfileRow>> {
    if !(r_max > 1.0) || !r_max.is_finite() || count == 0 {
        return Err(Error::domain("profile table needs r_max > 1 and at least one row"));
    }
    let prof = profile(n)?;
    let s_max = (r_max - 1.0).sqrt();
    (1..=count)
        .map(|i| {
            let s = s_max * i as f64 / count as f64;
            let r = 1.0 + s * s;
            Ok(ProfileRow {
                r,
                phi: prof.phi(r)?,
                dphi: prof.dphi(r),
            })
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CurveRow {
    pub r: f64,
    pub radius: f64,
    pub height: f64,
}

/// Meridian `(λ r, λ φ(r) + μ)` of `C_alpha` on `[R_alpha, r_max]`.
pub fn meridian_curve(cat: &CatenoidFamily, r_max: f64, count: usize) -> Result<Vec<CurveRow>> {
    Ok(radial_nodes(cat, r_max, count)?
        .into_iter()
        .map(|r| CurveRow {
            r,
            radius: cat.lambda() * r,
            height: cat.height(r),
        })
        .collect())
}

/// `count` parameters from `R_alpha` to `r_max`, uniform in `sqrt(r - 1)`.
fn radial_nodes(cat: &CatenoidFamily, r_max: f64, count: usize) -> Result<Vec<f64>> {
    let r0 = cat.r_alpha();
    if !(r_max > r0) || !r_max.is_finite() || count < 2 {
        return Err(Error::domain(format!("r_max must exceed R_alpha = {r0} and at least two rings are needed")));
    }
    let (s0, s1) = ((r0 - 1.0).sqrt(), (r_max - 1.0).sqrt());
    let mut nodes: Vec<f64> = (0..count)
        .map(|i| {
            let s = s0 + (s1 - s0) * i as f64 / (count - 1) as f64;
            1.0 + s * s
        })
        .collect();
    nodes[0] = r0;
    nodes[count - 1] = r_max;
    Ok(nodes)
}

/// Triangulated surface; faces index into `vertices` from zero.
#[derive(Debug, Clone, Default)]
pub struct SurfaceMesh {
    pub vertices: Vec<[f64; 3]>,
    pub faces: Vec<[usize; 3]>,
}

impl SurfaceMesh {
    /// Surface of revolution of an n = 2 member with `rings` parameter values
    /// and `segments` angular columns; the seam reuses the first column.
    /// Faces wind counter-clockwise seen from the side the unit normal points to.
    pub fn catenoid(cat: &CatenoidFamily, r_max: f64, rings: usize, segments: usize) -> Result<Self> {
        if cat.n() != 2 {
            return Err(Error::UnsupportedDimension {
                required: "n = 2".into(),
                actual: cat.n(),
            });
        }
        if segments < 3 {
            return Err(Error::domain("a mesh needs at least three angular segments"));
        }
        let radii = radial_nodes(cat, r_max, rings)?;
        let mut vertices = Vec::with_capacity(rings * segments);
        for &r in &radii {
            for j in 0..segments {
                let theta = 2.0 * PI * j as f64 / segments as f64;
                let p = cat.embed(r, &[theta.cos(), theta.sin()])?.position;
                vertices.push([p[0], p[1], p[2]]);
            }
        }
        let id = |i: usize, j: usize| i * segments + j % segments;
        let mut faces = Vec::with_capacity(2 * (rings - 1) * segments);
        for i in 0..rings - 1 {
            for j in 0..segments {
                faces.push([id(i, j), id(i + 1, j), id(i + 1, j + 1)]);
                faces.push([id(i, j), id(i + 1, j + 1), id(i, j + 1)]);
            }
        }
        Ok(Self { vertices, faces })
    }

    pub fn write_obj<W: Write>(&self, mut out: W) -> Result<()> {
        for v in &self.vertices {
            writeln!(out, "v {:.12} {:.12} {:.12}", v[0], v[1], v[2])?;
        }
        for f in &self.faces {
            writeln!(out, "f {} {} {}", f[0] + 1, f[1] + 1, f[2] + 1)?;
        }
        Ok(())
    }
}

/// Write serializable rows as CSV with a header.
pub fn write_csv<W: Write, T: Serialize>(out: W, rows: &[T]) -> Result<()> {
    let mut writer = csv::Writer::from_writer(out);
    for row in rows {
        writer.serialize(row)?;
    }
    writer.flush()?;
    Ok(())
}

#[derive(Debug, Clone, Serialize)]
pub struct SweepRow {
    pub alpha: f64,
    pub r_alpha: f64,
    pub lambda: f64,
    pub mu: f64,
    pub d_lambda: f64,
    /// Limit of `u` at infinity for n > 2, sign of `dλ/dα` for n = 2.
    pub indicator: f64,
    pub stabilized_index: Option<usize>,
    pub index_status: IndexStatus,
    pub first_zero: Option<f64>,
    pub total_curvature: Option<f64>,
}

pub fn sweep_row(n: usize, alpha: f64, options: &IndexOptions) -> Result<SweepRow> {
    let cat = CatenoidFamily::new(n, alpha)?;
    let index = morse_index(&cat, options)?;
    let indicator = if n == 2 {
        cat.d_lambda().signum()
    } else {
        criticality_indicator(&cat)?
    };
    Ok(SweepRow {
        alpha,
        r_alpha: cat.r_alpha(),
        lambda: cat.lambda(),
        mu: cat.mu(),
        d_lambda: cat.d_lambda(),
        indicator,
        stabilized_index: index.stabilized_index,
        index_status: index.status,
        first_zero: first_zero(&alpha_jacobi_field(&cat))?,
        total_curvature: if n == 2 { Some(total_curvature(alpha)?) } else { None },
    })
}

/// Rows for each angle, computed in parallel and returned in input order.
pub fn sweep(n: usize, alphas: &[f64], options: &IndexOptions) -> Result<Vec<SweepRow>> {
    alphas.par_iter().map(|&a| sweep_row(n, a, options)).collect()
}

/// `steps` angles from `lo` to `hi` inclusive.
pub fn angle_range(lo: f64, hi: f64, steps: usize) -> Result<Vec<f64>> {
    if steps == 0 || !(lo <= hi) {
        return Err(Error::domain("angle range needs lo <= hi and at least one step"));
    }
    if steps == 1 {
        return Ok(vec![lo]);
    }
    Ok((0..steps).map(|i| lo + (hi - lo) * i as f64 / (steps - 1) as f64).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::collections::HashMap;

    #[test]
    fn mesh_is_closed_along_the_seam() {
        let cat = CatenoidFamily::new(2, 0.9).unwrap();
        let mesh = SurfaceMesh::catenoid(&cat, 10.0, 12, 24).unwrap();
        assert_eq!(mesh.vertices.len(), 12 * 24);
        let mut edges: HashMap<(usize, usize), usize> = HashMap::new();
        for f in &mesh.faces {
            for k in 0..3 {
                let (a, b) = (f[k], f[(k + 1) % 3]);
                *edges.entry((a.min(b), a.max(b))).or_default() += 1;
            }
        }
        // Open edges only on the first and last rings.
        for (&(a, b), &count) in &edges {
            assert!(count <= 2);
            if count == 1 {
                let ring = |v: usize| v / 24;
                assert!(ring(a) == ring(b) && (ring(a) == 0 || ring(a) == 11));
            }
        }
    }

    #[test]
    fn boundary_ring_is_on_the_sphere() {
        let cat = CatenoidFamily::new(2, 1.2).unwrap();
        let mesh = SurfaceMesh::catenoid(&cat, 5.0, 8, 16).unwrap();
        for v in &mesh.vertices[..16] {
            let norm = (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).sqrt();
            assert!((norm - 1.0).abs() < 1e-8);
        }
    }

    #[test]
    fn faces_wind_around_the_normal() {
        let cat = CatenoidFamily::new(2, 0.6).unwrap();
        let mesh = SurfaceMesh::catenoid(&cat, 4.0, 6, 20).unwrap();
        for f in &mesh.faces {
            let [a, b, c] = f.map(|i| mesh.vertices[i]);
            let e1 = [b[0] - a[0], b[1] - a[1], b[2] - a[2]];
            let e2 = [c[0] - a[0], c[1] - a[1], c[2] - a[2]];
            let cross = [
                e1[1] * e2[2] - e1[2] * e2[1],
                e1[2] * e2[0] - e1[0] * e2[2],
                e1[0] * e2[1] - e1[1] * e2[0],
            ];
            let centre = [0, 1].map(|k| (a[k] + b[k] + c[k]) / 3.0);
            let r = centre[0].hypot(centre[1]) / cat.lambda();
            let p = [centre[0], centre[1]].map(|x| x / (cat.lambda() * r));
            let normal = cat.embed(r.max(cat.r_alpha()), &p).unwrap().unit_normal;
            let dot: f64 = cross.iter().zip(&normal).map(|(x, y)| x * y).sum();
            assert!(dot > 0.0);
        }
    }

    #[test]
    fn mesh_rejects_higher_dimensions() {
        let cat = CatenoidFamily::new(3, 0.6).unwrap();
        assert!(matches!(
            SurfaceMesh::catenoid(&cat, 4.0, 6, 20),
            Err(Error::UnsupportedDimension { .. })
        ));
    }

    #[test]
    fn obj_text_is_one_based() {
        let cat = CatenoidFamily::new(2, 0.6).unwrap();
        let mesh = SurfaceMesh::catenoid(&cat, 4.0, 2, 3).unwrap();
        let mut buf = Vec::new();
        mesh.write_obj(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert_eq!(text.lines().filter(|l| l.starts_with("v ")).count(), 6);
        assert!(text.lines().any(|l| l == "f 1 4 5"));
        assert!(!text.contains(" 0 ") && !text.ends_with(" 0\n"));
    }

    #[test]
    fn profile_table_starts_near_one() {
        let rows = profile_table(3, 10.0, 50).unwrap();
        assert_eq!(rows.len(), 50);
        assert!(rows[0].r > 1.0 && (rows[49].r - 10.0).abs() < 1e-12);
        assert!(rows.windows(2).all(|w| w[0].phi < w[1].phi && w[0].dphi > w[1].dphi));
    }

    #[test]
    fn sweep_is_ordered_and_monotone() {
        let alphas = angle_range(0.2, 1.4, 7).unwrap();
        let rows = sweep(2, &alphas, &IndexOptions::default()).unwrap();
        assert_eq!(rows.iter().map(|r| r.alpha).collect::<Vec<_>>(), alphas);
        let index: Vec<usize> = rows.iter().map(|r| r.stabilized_index.unwrap()).collect();
        assert!(index.windows(2).all(|w| w[0] <= w[1]));
        assert_eq!((index[0], index[6]), (0, 1));
        for row in &rows {
            let tc = row.total_curvature.unwrap();
            assert!(tc > 0.0 && tc < 4.0 * PI);
        }
        let mut buf = Vec::new();
        write_csv(&mut buf, &rows).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert!(text.starts_with("alpha,r_alpha,lambda,mu,d_lambda,indicator,stabilized_index"));
    }
}
