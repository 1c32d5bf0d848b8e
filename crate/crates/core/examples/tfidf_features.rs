//! TF-IDF vocabulary and sparse vectors, and the dense embedding file format.
//!
//! ```text
//! cargo run --example tfidf_features
//! ```

use hopeedi::features::{build_vocab, parse_embeddings, tfidf_vectorize, write_embeddings, FeatureVector};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let docs =
        ["stay strong you will win", "you are strong and kind", "this video is boring", "what a boring waste of time"];
    let vocab = build_vocab(&docs, 1)?;
    println!("{} documents, {} terms", vocab.num_docs(), vocab.len());
    for (i, term) in vocab.terms().iter().enumerate() {
        println!("  {term:<8} df={} idf={:.4}", vocab.doc_freq(i), vocab.idf(i));
    }

    let probe = "strong and kind but boring";
    let v = tfidf_vectorize(probe, &vocab);
    println!("\n{probe:?} -> norm {:.6}", v.norm());
    if let FeatureVector::Sparse { entries, .. } = &v {
        for (i, w) in entries {
            println!("  {:<8} {w:.4}", vocab.terms()[*i]);
        }
    }

    let dense = vec![FeatureVector::Dense(vec![0.25, -1.0, 0.5]), FeatureVector::Dense(vec![1.0, 0.0, 2.0])];
    let text = write_embeddings(&dense, &["sentence embeddings, dim 3"]);
    println!("\nembedding file:\n{text}");
    assert_eq!(parse_embeddings(&text, 3)?, dense);
    Ok(())
}
