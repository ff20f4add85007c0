//! Resolves songs against an offline entity fixture and prints every
//! candidate with its similarity scores and verdict.
//!
//!     cargo run --example link_songs [-- <entities.json> <songs.tsv>]

use std::fs::File;
use std::io::BufReader;
use std::path::PathBuf;

use borrowscope::catalog::{best_match, load_songs, resolve_songs, FixtureSource, LinkConfig};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let demo = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("fixtures/demo");
    let mut args = std::env::args().skip(1);
    let entities = args.next().map_or(demo.join("entities.json"), PathBuf::from);
    let songs = args.next().map_or(demo.join("songs.tsv"), PathBuf::from);

    let source = FixtureSource::open(&entities)?;
    let songs = load_songs(BufReader::new(File::open(songs)?))?;
    let config = LinkConfig::default();
    let decisions = resolve_songs(&songs, &source, &config)?;

    for (song, ds) in songs.iter().zip(&decisions) {
        let linked = best_match(ds).and_then(|d| d.freebase_mid.as_deref()).unwrap_or("unlinked");
        println!("{} \"{}\" by {} -> {linked}", song.song_id, song.title, song.artist);
        for d in ds {
            println!(
                "    {:<10} title {:.3}  artist {:.3}  class {:<5}  accepted {}",
                d.kb_id, d.title_similarity, d.artist_similarity, d.class_passed, d.accepted
            );
        }
    }
    Ok(())
}
