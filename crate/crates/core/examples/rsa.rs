use qvm::factoring::{classical_order, rsa_crack, rsa_decrypt, rsa_encrypt, rsa_keygen};

fn main() -> qvm::Result<()> {
    let key = rsa_keygen(3, 11, 7)?;
    println!("n={} e={} d={}", key.n, key.e, key.d);
    for m in [2u64, 5, 19, 31] {
        let c = rsa_encrypt(m, &key)?;
        let cracked = rsa_crack(c, key.public(), classical_order)?;
        println!("{m:>2} -> {c:>2} -> {} (cracked {cracked})", rsa_decrypt(c, &key)?);
    }
    Ok(())
}
