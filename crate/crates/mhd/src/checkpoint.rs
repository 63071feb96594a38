//! Binary checkpoints.
//!
//! Layout, all little-endian:
//!
//! ```text
//! magic     8 bytes  "BPMHDCKP"
//! version   u32
//! N         u64      modes per axis
//! n         u64      spatial dimension
//! L         f64      period
//! t         f64
//! params    7 × f64  eps, mu0, mu1, alpha, mu, s_diff, f_amp
//! history   u8       1 if two-step history follows the state
//! u, b      n × N^n complex (re f64, im f64) each
//! [hu, hb]  same shape, only when history = 1
//! ```

use std::io::{self, Read, Write};

use bipolar_mhd_core::{DomainSpec, PhysicalParams};
use num_complex::Complex64;
use thiserror::Error;

use crate::dynamics::{History, State};
use crate::spectral::SpectralVectorField;

pub const MAGIC: &[u8; 8] = b"BPMHDCKP";
pub const VERSION: u32 = 1;

#[derive(Debug, Error)]
pub enum CheckpointError {
    #[error("not a checkpoint file (bad magic)")]
    BadMagic,
    #[error("unsupported checkpoint version {0}")]
    Version(u32),
    #[error("invalid checkpoint header: {0}")]
    Header(String),
    #[error(transparent)]
    Io(#[from] io::Error),
}

#[derive(Debug, Clone, PartialEq)]
pub struct Checkpoint {
    pub dom: DomainSpec,
    pub params: PhysicalParams,
    pub state: State,
    pub history: Option<History>,
}

fn put_f64(w: &mut impl Write, v: f64) -> io::Result<()> {
    w.write_all(&v.to_le_bytes())
}

fn put_field(w: &mut impl Write, v: &SpectralVectorField) -> io::Result<()> {
    for c in &v.comps {
        for x in c {
            put_f64(w, x.re)?;
            put_f64(w, x.im)?;
        }
    }
    Ok(())
}

pub fn write_checkpoint(
    w: &mut impl Write,
    state: &State,
    params: &PhysicalParams,
    history: Option<&History>,
) -> io::Result<()> {
    let dom = state.u.dom;
    w.write_all(MAGIC)?;
    w.write_all(&VERSION.to_le_bytes())?;
    w.write_all(&(dom.resolution as u64).to_le_bytes())?;
    w.write_all(&(dom.dim as u64).to_le_bytes())?;
    put_f64(w, dom.length)?;
    put_f64(w, state.t)?;
    for v in [
        params.eps,
        params.mu0,
        params.mu1,
        params.alpha,
        params.mu,
        params.s_diff,
        params.f_amp,
    ] {
        put_f64(w, v)?;
    }
    w.write_all(&[u8::from(history.is_some())])?;
    put_field(w, &state.u)?;
    put_field(w, &state.b)?;
    if let Some(h) = history {
        put_field(w, &h.u)?;
        put_field(w, &h.b)?;
    }
    Ok(())
}

fn get<const K: usize>(r: &mut impl Read) -> io::Result<[u8; K]> {
    let mut buf = [0u8; K];
    r.read_exact(&mut buf)?;
    Ok(buf)
}

fn get_f64(r: &mut impl Read) -> io::Result<f64> {
    Ok(f64::from_le_bytes(get::<8>(r)?))
}

fn get_field(r: &mut impl Read, dom: DomainSpec) -> io::Result<SpectralVectorField> {
    let len = dom.points();
    let mut comps = Vec::with_capacity(dom.dim);
    for _ in 0..dom.dim {
        let mut c = Vec::with_capacity(len);
        for _ in 0..len {
            let re = get_f64(r)?;
            let im = get_f64(r)?;
            c.push(Complex64::new(re, im));
        }
        comps.push(c);
    }
    Ok(SpectralVectorField { dom, comps })
}

pub fn read_checkpoint(r: &mut impl Read) -> Result<Checkpoint, CheckpointError> {
    if &get::<8>(r)? != MAGIC {
        return Err(CheckpointError::BadMagic);
    }
    let version = u32::from_le_bytes(get::<4>(r)?);
    if version != VERSION {
        return Err(CheckpointError::Version(version));
    }
    let resolution = u64::from_le_bytes(get::<8>(r)?) as usize;
    let dim = u64::from_le_bytes(get::<8>(r)?) as usize;
    if !(dim == 2 || dim == 3) || !(8..=4096).contains(&resolution) {
        return Err(CheckpointError::Header(format!(
            "dim {dim}, resolution {resolution}"
        )));
    }
    let length = get_f64(r)?;
    let dom = DomainSpec::new(dim, length, resolution);
    let t = get_f64(r)?;
    let mut p = [0.0; 7];
    for v in p.iter_mut() {
        *v = get_f64(r)?;
    }
    let params = PhysicalParams {
        eps: p[0],
        mu0: p[1],
        mu1: p[2],
        alpha: p[3],
        mu: p[4],
        s_diff: p[5],
        f_amp: p[6],
    };
    let has_history = get::<1>(r)?[0];
    let u = get_field(r, dom)?;
    let b = get_field(r, dom)?;
    let history = match has_history {
        0 => None,
        1 => Some(History {
            u: get_field(r, dom)?,
            b: get_field(r, dom)?,
        }),
        other => return Err(CheckpointError::Header(format!("history flag {other}"))),
    };
    Ok(Checkpoint {
        dom,
        params,
        state: State { u, b, t },
        history,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectral::Grid;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn round_trip_is_bit_exact() {
        let g = Grid::new(DomainSpec::new(2, 3.7, 8));
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let state = State {
            u: g.random_solenoidal(&mut rng, 9.0),
            b: g.random_solenoidal(&mut rng, 9.0),
            t: 0.1 + 0.2,
        };
        let hist = History {
            u: g.random_solenoidal(&mut rng, 9.0),
            b: g.random_solenoidal(&mut rng, 9.0),
        };
        let params = PhysicalParams::default();
        for h in [None, Some(&hist)] {
            let mut buf = Vec::new();
            write_checkpoint(&mut buf, &state, &params, h).unwrap();
            let ck = read_checkpoint(&mut buf.as_slice()).unwrap();
            assert_eq!(ck.state, state);
            assert_eq!(ck.params, params);
            assert_eq!(ck.history.as_ref(), h);
            assert_eq!(ck.dom, *g.dom());
        }
    }

    #[test]
    fn rejects_foreign_bytes() {
        let bytes = b"NOTACHECKPOINT__________";
        assert!(matches!(
            read_checkpoint(&mut bytes.as_slice()),
            Err(CheckpointError::BadMagic)
        ));
    }
}
