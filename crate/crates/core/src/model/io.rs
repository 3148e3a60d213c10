//! Binary model files.
//!
//! ```text
//! "ULEM"  u32 version
//! u32 len, header        UTF-8 key=value hyperparameter lines
//! u32 len, input vocab   UTF-8 lines kind<TAB>text<TAB>id<TAB>frequency
//! u32 len, output vocab
//! u32 count, then per parameter:
//!     u32 len, name, u32 rows, u32 cols, rows*cols f32
//! ```
//!
//! All integers and floats are little-endian.

use std::fs::File;
use std::io::{self, BufReader, BufWriter, Read, Write};
use std::path::Path;

use super::{HyperParams, Seq2SeqModel};
use crate::codec::Vocabulary;
use crate::error::{Error, Result};
use crate::nn::Tensor;

pub const MAGIC: &[u8; 4] = b"ULEM";
pub const FORMAT_VERSION: u32 = 1;

fn write_u32<W: Write>(w: &mut W, v: u32) -> io::Result<()> {
    w.write_all(&v.to_le_bytes())
}

fn write_block<W: Write>(w: &mut W, bytes: &[u8]) -> io::Result<()> {
    write_u32(w, bytes.len() as u32)?;
    w.write_all(bytes)
}

pub fn save_model<W: Write>(model: &Seq2SeqModel<f32>, mut w: W) -> Result<()> {
    w.write_all(MAGIC)?;
    write_u32(&mut w, FORMAT_VERSION)?;
    write_block(&mut w, model.hyper.to_kv().as_bytes())?;
    write_block(&mut w, model.input_vocab.to_lines().as_bytes())?;
    write_block(&mut w, model.output_vocab.to_lines().as_bytes())?;
    write_u32(&mut w, model.params.len() as u32)?;
    for (_, p) in model.params.iter() {
        write_block(&mut w, p.name.as_bytes())?;
        write_u32(&mut w, p.value.rows() as u32)?;
        write_u32(&mut w, p.value.cols() as u32)?;
        let mut buf = Vec::with_capacity(p.value.data().len() * 4);
        for x in p.value.data() {
            buf.extend_from_slice(&x.to_le_bytes());
        }
        w.write_all(&buf)?;
    }
    w.flush()?;
    Ok(())
}

pub fn save_model_file(model: &Seq2SeqModel<f32>, path: impl AsRef<Path>) -> Result<()> {
    save_model(model, BufWriter::new(File::create(path)?))
}

struct Input<R>(R);

impl<R: Read> Input<R> {
    fn exact(&mut self, buf: &mut [u8]) -> Result<()> {
        self.0.read_exact(buf).map_err(|e| match e.kind() {
            io::ErrorKind::UnexpectedEof => Error::ModelFormat("file is truncated".into()),
            _ => Error::Io(e),
        })
    }

    fn u32(&mut self) -> Result<u32> {
        let mut b = [0u8; 4];
        self.exact(&mut b)?;
        Ok(u32::from_le_bytes(b))
    }

    fn text(&mut self, what: &str) -> Result<String> {
        let len = self.u32()? as usize;
        let mut buf = vec![0u8; len];
        self.exact(&mut buf)?;
        String::from_utf8(buf).map_err(|_| Error::ModelFormat(format!("{what} is not UTF-8")))
    }
}

pub fn load_model<R: Read>(r: R) -> Result<Seq2SeqModel<f32>> {
    let mut input = Input(r);
    let mut magic = [0u8; 4];
    input.exact(&mut magic)?;
    if &magic != MAGIC {
        return Err(Error::ModelFormat("bad magic, not a model file".into()));
    }
    let version = input.u32()?;
    if version != FORMAT_VERSION {
        return Err(Error::ModelFormat(format!(
            "format version {version}, this build reads {FORMAT_VERSION}"
        )));
    }
    let hyper = HyperParams::from_kv(&input.text("header")?)
        .map_err(|e| Error::ModelFormat(e.to_string()))?;
    let input_vocab = Vocabulary::from_lines(&input.text("input vocabulary")?)?;
    let output_vocab = Vocabulary::from_lines(&input.text("output vocabulary")?)?;

    let mut model = Seq2SeqModel::new(hyper, input_vocab, output_vocab)?;
    let count = input.u32()? as usize;
    if count != model.params.len() {
        return Err(Error::ModelFormat(format!(
            "{count} parameter blocks, architecture has {}",
            model.params.len()
        )));
    }
    let ids: Vec<_> = model.params.iter().map(|(id, _)| id).collect();
    for id in ids {
        let name = input.text("parameter name")?;
        let rows = input.u32()? as usize;
        let cols = input.u32()? as usize;
        let p = model.params.get_mut(id);
        if name != p.name || [rows, cols] != p.value.shape() {
            return Err(Error::ModelFormat(format!(
                "parameter {name:?} {rows}x{cols} does not match {:?} {:?}",
                p.name,
                p.value.shape()
            )));
        }
        let mut buf = vec![0u8; rows * cols * 4];
        input.exact(&mut buf)?;
        let data = buf
            .chunks_exact(4)
            .map(|c| f32::from_le_bytes([c[0], c[1], c[2], c[3]]))
            .collect();
        p.value = Tensor::from_vec(rows, cols, data)?;
    }
    Ok(model)
}

pub fn load_model_file(path: impl AsRef<Path>) -> Result<Seq2SeqModel<f32>> {
    load_model(BufReader::new(File::open(path)?))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::codec::{build_vocabularies, encode_parts, Symbol, WeightGroup};

    fn model() -> Seq2SeqModel<f32> {
        let exs: Vec<_> = ["abc", "bcä"]
            .iter()
            .map(|w| encode_parts(w, Some(w), vec![Symbol::tag("UPOS=X")], WeightGroup::Gold).unwrap())
            .collect();
        let (iv, ov) = build_vocabularies(&exs, 1);
        let hyper = HyperParams {
            embedding_dim: 3,
            hidden_dim: 4,
            seed: 5,
            ..HyperParams::default()
        };
        Seq2SeqModel::new(hyper, iv, ov).unwrap()
    }

    fn bytes(m: &Seq2SeqModel<f32>) -> Vec<u8> {
        let mut out = Vec::new();
        save_model(m, &mut out).unwrap();
        out
    }

    #[test]
    fn round_trip_is_bit_exact() {
        let m = model();
        let b = bytes(&m);
        let loaded = load_model(&b[..]).unwrap();
        assert_eq!(loaded.hyper, m.hyper);
        assert_eq!(loaded.input_vocab, m.input_vocab);
        for ((_, a), (_, b)) in m.params.iter().zip(loaded.params.iter()) {
            let bits = |t: &Tensor<f32>| t.data().iter().map(|x| x.to_bits()).collect::<Vec<_>>();
            assert_eq!(bits(&a.value), bits(&b.value));
        }
        assert_eq!(bytes(&loaded), b);
    }

    #[test]
    fn truncated_file_is_a_clean_error() {
        let b = bytes(&model());
        for cut in [0, 3, 6, 20, b.len() / 2, b.len() - 1] {
            match load_model(&b[..cut]) {
                Err(Error::ModelFormat(msg)) => assert!(msg.contains("truncated"), "{msg}"),
                other => panic!("cut {cut}: unexpected {:?}", other.map(|_| ())),
            }
        }
    }

    #[test]
    fn wrong_magic_and_version_rejected() {
        let mut b = bytes(&model());
        b[0] = b'X';
        assert!(matches!(load_model(&b[..]), Err(Error::ModelFormat(_))));
        let mut b = bytes(&model());
        b[4] = 9;
        match load_model(&b[..]) {
            Err(Error::ModelFormat(msg)) => assert!(msg.contains("version")),
            other => panic!("unexpected {:?}", other.map(|_| ())),
        }
    }
}
