//! Quantum-style semantic spaces built from text.
//!
//! The pipeline runs in four stages:
//!
//! - [`ingest`] turns plain text or Reuters-21578 SGML into token documents.
//! - [`space`] slides a window over those documents to build HAL
//!   co-occurrence matrices, symmetric semantic spaces (global and
//!   word-centered), and word state vectors.
//! - [`spectral`] decomposes a space into eigenstates ("senses"), rebuilds
//!   truncated spaces and normalizes spaces into density operators.
//! - [`collapse`] models context effects: a word state is collapsed by a
//!   context operator, by a projector, or read off another word's space.
//!
//! [`store`] persists spaces and eigensystems in a line-oriented text
//! archive and [`cli`] ties everything together behind the `qsem` binary.
//!
//! ```
//! use qsem::ingest::{Document, TokenizerConfig};
//! use qsem::space::{build_hal, symmetrize, top_associates, word_vector, Corpus};
//!
//! let cfg = TokenizerConfig::default();
//! let doc = Document::from_text("d0", "President Reagan ignorant of the arms scandal", &cfg);
//! let corpus = Corpus::new(&[doc]);
//! let s = symmetrize(&build_hal(&corpus, 5)?);
//! let v = word_vector(&s, "scandal")?;
//! assert_eq!(top_associates(&v, 2), vec![("arms".into(), 5.0), ("the".into(), 4.0)]);
//! # Ok::<(), qsem::Error>(())
//! ```

pub mod cli;
pub mod collapse;
mod error;
pub mod ingest;
pub mod space;
pub mod spectral;
pub mod store;

pub use error::{Error, Result};
