//! Command-line front end: key lifecycle, byte-message encryption and
//! decryption, self-test, and probe reporting.
//!
//! Key and ciphertext files are UTF-8 JSON with every integer as a decimal
//! string and fields in fixed alphabetical order, so identical inputs
//! produce byte-identical files.

use std::fs;
use std::io::Write as _;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};
use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_traits::{Num, Zero};
use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;
use serde::{Deserialize, Serialize};

use crate::modmath::{is_probable_prime, DEFAULT_MR_ROUNDS};
use crate::oracle::shift_probe;
use crate::scheme::{
    decrypt, encrypt_det, encrypt_prob, keygen, trapdoor_exponent, Ciphertext, PrivateKey,
    PublicKey, SchemeError,
};
use crate::selftest;
use crate::sequence::is_irreducible_cubic_unchecked;

pub const EXIT_OK: i32 = 0;
pub const EXIT_IO: i32 = 1;
pub const EXIT_KEYGEN_EXHAUSTED: i32 = 2;
pub const EXIT_SELFTEST_FAILED: i32 = 3;
pub const EXIT_USAGE: i32 = 64;
pub const EXIT_MESSAGE_OUT_OF_RANGE: i32 = 65;
pub const EXIT_INVALID_CIPHERTEXT: i32 = 66;

#[derive(Parser)]
#[command(name = "cubicseq", about = "Third-order sequence cryptosystem tool")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand)]
pub enum Command {
    /// Generate a key pair and write public and private key files.
    Keygen {
        /// Bits per prime factor (>= 3).
        #[arg(long)]
        bits: u64,
        /// Output path for the public key file.
        #[arg(long = "pub")]
        pub_path: PathBuf,
        /// Output path for the private key file.
        #[arg(long = "priv")]
        priv_path: PathBuf,
        /// 64-bit seed for reproducible output; omit for system entropy.
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Encrypt a byte message (interpreted as a big-endian integer < n).
    Encrypt {
        #[arg(long = "pub")]
        pub_path: PathBuf,
        /// Input message file.
        #[arg(long = "in")]
        in_path: PathBuf,
        /// Output ciphertext file.
        #[arg(long = "out")]
        out_path: PathBuf,
        #[arg(long, value_enum)]
        mode: EncryptMode,
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Decrypt a ciphertext file; plaintext bytes go to standard output.
    Decrypt {
        #[arg(long = "priv")]
        priv_path: PathBuf,
        #[arg(long = "in")]
        in_path: PathBuf,
    },
    /// Run the oracle suite and print one PASS/FAIL line per invariant.
    Selftest {
        #[arg(long)]
        full: bool,
    },
    /// Run the generator-shift probe at an arbitrary exponent.
    Probe {
        #[arg(long = "priv")]
        priv_path: PathBuf,
        /// Exponent k (decimal, may be negative or "lambda").
        #[arg(long)]
        k: String,
    },
}

#[derive(Copy, Clone, ValueEnum)]
pub enum EncryptMode {
    Det,
    Prob,
}

// --- file formats (field order is the serialized order) ---

#[derive(Serialize, Deserialize)]
struct PublicKeyFile {
    a: String,
    b: String,
    n: String,
    role: String,
    version: String,
}

#[derive(Serialize, Deserialize)]
struct PrivateKeyFile {
    a: String,
    b: String,
    l_ab_inv: String,
    lambda: String,
    n: String,
    p: String,
    q: String,
    role: String,
    version: String,
}

#[derive(Serialize, Deserialize)]
struct CiphertextFile {
    c1: String,
    c2: String,
    n: String,
    version: String,
}

#[derive(Debug, thiserror::Error)]
pub enum FileError {
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
    #[error("parse error: {0}")]
    Json(#[from] serde_json::Error),
    #[error("invalid key/ciphertext file: {0}")]
    Invalid(String),
}

fn dec(s: &str, field: &str) -> Result<BigUint, FileError> {
    BigUint::from_str_radix(s, 10)
        .map_err(|_| FileError::Invalid(format!("field {field} is not a decimal integer: {s:?}")))
}

pub fn write_public_key(path: &Path, pk: &PublicKey) -> Result<(), FileError> {
    let file = PublicKeyFile {
        a: pk.a.to_string(),
        b: pk.b.to_string(),
        n: pk.n.to_string(),
        role: "public".to_string(),
        version: "v1".to_string(),
    };
    write_json(path, &file)
}

pub fn write_private_key(path: &Path, sk: &PrivateKey) -> Result<(), FileError> {
    let file = PrivateKeyFile {
        a: sk.a.to_string(),
        b: sk.b.to_string(),
        l_ab_inv: sk.l_ab_inv.to_string(),
        lambda: sk.lambda.to_string(),
        n: sk.n.to_string(),
        p: sk.p.to_string(),
        q: sk.q.to_string(),
        role: "private".to_string(),
        version: "v1".to_string(),
    };
    write_json(path, &file)
}

pub fn write_ciphertext(path: &Path, n: &BigUint, ct: &Ciphertext) -> Result<(), FileError> {
    let file = CiphertextFile {
        c1: ct.c1.to_string(),
        c2: ct.c2.to_string(),
        n: n.to_string(),
        version: "v1".to_string(),
    };
    write_json(path, &file)
}

fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<(), FileError> {
    let mut body = serde_json::to_string(value)?;
    body.push('\n');
    fs::write(path, body)?;
    Ok(())
}

fn check_version_role(version: &str, role: &str, expected_role: &str) -> Result<(), FileError> {
    if version != "v1" {
        return Err(FileError::Invalid(format!("unsupported version {version:?}")));
    }
    if role != expected_role {
        return Err(FileError::Invalid(format!(
            "expected role {expected_role:?}, found {role:?}"
        )));
    }
    Ok(())
}

pub fn read_public_key(path: &Path) -> Result<PublicKey, FileError> {
    let file: PublicKeyFile = serde_json::from_str(&fs::read_to_string(path)?)?;
    check_version_role(&file.version, &file.role, "public")?;
    let n = dec(&file.n, "n")?;
    let a = dec(&file.a, "a")?;
    let b = dec(&file.b, "b")?;
    validate_public(&n, &a, &b)?;
    Ok(PublicKey { n, a, b })
}

fn validate_public(n: &BigUint, a: &BigUint, b: &BigUint) -> Result<(), FileError> {
    if n.is_even() || *n < BigUint::from(15u32) {
        return Err(FileError::Invalid("n must be odd and >= 15".to_string()));
    }
    let n2 = n * n;
    if a >= &n2 || b >= &n2 {
        return Err(FileError::Invalid("a and b must be < n^2".to_string()));
    }
    Ok(())
}

pub fn read_private_key(path: &Path) -> Result<PrivateKey, FileError> {
    let file: PrivateKeyFile = serde_json::from_str(&fs::read_to_string(path)?)?;
    check_version_role(&file.version, &file.role, "private")?;
    let p = dec(&file.p, "p")?;
    let q = dec(&file.q, "q")?;
    let n = dec(&file.n, "n")?;
    let a = dec(&file.a, "a")?;
    let b = dec(&file.b, "b")?;
    let lambda = dec(&file.lambda, "lambda")?;
    let l_ab_inv = dec(&file.l_ab_inv, "l_ab_inv")?;
    validate_public(&n, &a, &b)?;
    if &p * &q != n {
        return Err(FileError::Invalid("n != p * q".to_string()));
    }
    if p == q {
        return Err(FileError::Invalid("p and q must be distinct".to_string()));
    }
    for f in [&p, &q] {
        if f.is_even() || !is_probable_prime(f, DEFAULT_MR_ROUNDS) {
            return Err(FileError::Invalid(format!("{f} is not an odd prime")));
        }
    }
    if lambda != trapdoor_exponent(&p, &q) {
        return Err(FileError::Invalid(
            "lambda != lcm(p^2 + p + 1, q^2 + q + 1)".to_string(),
        ));
    }
    if l_ab_inv >= n || l_ab_inv.is_zero() {
        return Err(FileError::Invalid("l_ab_inv must be in [1, n)".to_string()));
    }
    for prime in [&p, &q] {
        if !is_irreducible_cubic_unchecked(&(&a % prime), &(&b % prime), prime) {
            return Err(FileError::Invalid(format!(
                "generator cubic is reducible modulo {prime}"
            )));
        }
    }
    Ok(PrivateKey {
        p,
        q,
        n,
        a,
        b,
        lambda,
        l_ab_inv,
    })
}

pub fn read_ciphertext(path: &Path) -> Result<(BigUint, Ciphertext), FileError> {
    let file: CiphertextFile = serde_json::from_str(&fs::read_to_string(path)?)?;
    if file.version != "v1" {
        return Err(FileError::Invalid(format!(
            "unsupported version {:?}",
            file.version
        )));
    }
    let n = dec(&file.n, "n")?;
    let c1 = dec(&file.c1, "c1")?;
    let c2 = dec(&file.c2, "c2")?;
    let n2 = &n * &n;
    if c1 >= n2 || c2 >= n2 {
        return Err(FileError::Invalid("c1 and c2 must be < n^2".to_string()));
    }
    Ok((n, Ciphertext { c1, c2 }))
}

fn make_rng(seed: Option<u64>) -> ChaCha20Rng {
    match seed {
        Some(s) => ChaCha20Rng::seed_from_u64(s),
        None => ChaCha20Rng::from_entropy(),
    }
}

// --- commands ---

pub fn run(cli: Cli) -> i32 {
    match cli.command {
        Command::Keygen {
            bits,
            pub_path,
            priv_path,
            seed,
        } => cmd_keygen(bits, &pub_path, &priv_path, seed),
        Command::Encrypt {
            pub_path,
            in_path,
            out_path,
            mode,
            seed,
        } => cmd_encrypt(&pub_path, &in_path, &out_path, mode, seed),
        Command::Decrypt { priv_path, in_path } => cmd_decrypt(&priv_path, &in_path),
        Command::Selftest { full } => cmd_selftest(full),
        Command::Probe { priv_path, k } => cmd_probe(&priv_path, &k),
    }
}

pub fn cmd_keygen(bits: u64, pub_path: &Path, priv_path: &Path, seed: Option<u64>) -> i32 {
    if bits < 3 {
        eprintln!("keygen: --bits must be at least 3");
        return EXIT_USAGE;
    }
    let mut rng = make_rng(seed);
    match keygen(bits, &mut rng) {
        Ok((pk, sk)) => {
            if let Err(e) = write_public_key(pub_path, &pk) {
                eprintln!("keygen: {e}");
                return EXIT_IO;
            }
            if let Err(e) = write_private_key(priv_path, &sk) {
                eprintln!("keygen: {e}");
                return EXIT_IO;
            }
            EXIT_OK
        }
        Err(e @ SchemeError::KeygenExhausted { .. }) => {
            eprintln!("keygen: {e}");
            EXIT_KEYGEN_EXHAUSTED
        }
        Err(e) => {
            eprintln!("keygen: {e}");
            EXIT_IO
        }
    }
}

pub fn cmd_encrypt(
    pub_path: &Path,
    in_path: &Path,
    out_path: &Path,
    mode: EncryptMode,
    seed: Option<u64>,
) -> i32 {
    let pk = match read_public_key(pub_path) {
        Ok(pk) => pk,
        Err(e) => {
            eprintln!("encrypt: {e}");
            return EXIT_IO;
        }
    };
    let message = match fs::read(in_path) {
        Ok(bytes) => BigUint::from_bytes_be(&bytes),
        Err(e) => {
            eprintln!("encrypt: {e}");
            return EXIT_IO;
        }
    };
    let result = match mode {
        EncryptMode::Det => encrypt_det(&pk, &message),
        EncryptMode::Prob => encrypt_prob(&pk, &message, &mut make_rng(seed)),
    };
    match result {
        Ok(ct) => match write_ciphertext(out_path, &pk.n, &ct) {
            Ok(()) => EXIT_OK,
            Err(e) => {
                eprintln!("encrypt: {e}");
                EXIT_IO
            }
        },
        Err(SchemeError::MessageOutOfRange) => {
            eprintln!("encrypt: message does not fit below n");
            EXIT_MESSAGE_OUT_OF_RANGE
        }
        Err(e) => {
            eprintln!("encrypt: {e}");
            EXIT_IO
        }
    }
}

pub fn cmd_decrypt(priv_path: &Path, in_path: &Path) -> i32 {
    let sk = match read_private_key(priv_path) {
        Ok(sk) => sk,
        Err(e) => {
            eprintln!("decrypt: {e}");
            return EXIT_IO;
        }
    };
    let (n, ct) = match read_ciphertext(in_path) {
        Ok(v) => v,
        Err(e) => {
            eprintln!("decrypt: {e}");
            return EXIT_IO;
        }
    };
    if n != sk.n {
        eprintln!("decrypt: ciphertext modulus does not match the key");
        return EXIT_IO;
    }
    match decrypt(&sk, &ct) {
        Ok(m) => {
            let bytes = if m.is_zero() { Vec::new() } else { m.to_bytes_be() };
            let mut out = std::io::stdout().lock();
            if out.write_all(&bytes).and_then(|_| out.flush()).is_err() {
                return EXIT_IO;
            }
            EXIT_OK
        }
        Err(SchemeError::InvalidCiphertext) => {
            eprintln!("decrypt: ciphertext pair is not in Gamma");
            EXIT_INVALID_CIPHERTEXT
        }
        Err(e) => {
            eprintln!("decrypt: {e}");
            EXIT_IO
        }
    }
}

pub fn cmd_selftest(full: bool) -> i32 {
    let report = selftest::run(full);
    for line in &report.lines {
        println!("{line}");
    }
    if report.hard_pass() {
        EXIT_OK
    } else {
        EXIT_SELFTEST_FAILED
    }
}

pub fn cmd_probe(priv_path: &Path, k: &str) -> i32 {
    let sk = match read_private_key(priv_path) {
        Ok(sk) => sk,
        Err(e) => {
            eprintln!("probe: {e}");
            return EXIT_IO;
        }
    };
    let exponent = if k == "lambda" {
        BigInt::from(sk.lambda.clone())
    } else {
        match k.parse::<BigInt>() {
            Ok(v) => v,
            Err(_) => {
                eprintln!("probe: --k must be a decimal integer or \"lambda\"");
                return EXIT_USAGE;
            }
        }
    };
    let report = shift_probe(&sk.p, &sk.q, &sk.a, &sk.b, &exponent);
    println!("{report}");
    EXIT_OK
}
