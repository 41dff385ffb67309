//! Random running text and rendered test pages for each language.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::decode::{Decoder, Language};
use crate::layout::BrailleGeometry;
use crate::synth::{add_noise, render_page, Encoder, NoiseKind, NoiseSpec, RenderStyle, RenderedPage, SynthError};

const ENGLISH: &str = include_str!("../../corpus/english.txt");
const HINDI: &str = include_str!("../../corpus/hindi.txt");
const TAMIL: &str = include_str!("../../corpus/tamil.txt");

/// Word list for a language, reduced to the words the table can write so
/// that they read back unchanged.
pub fn vocabulary(decoder: &Decoder) -> Vec<&'static str> {
    let raw = match decoder.language() {
        Language::English => ENGLISH,
        Language::Hindi => HINDI,
        Language::Tamil => TAMIL,
    };
    let enc = Encoder::new(decoder);
    raw.split_whitespace().filter(|w| enc.encode_word(w).is_ok()).collect()
}

/// Between `min_words` and `max_words` words of random text. English text
/// also gets numbers and punctuation; Indic text gets commas and the
/// script's full stop.
pub fn random_text(decoder: &Decoder, min_words: usize, max_words: usize, seed: u64) -> String {
    let vocab = vocabulary(decoder);
    let enc = Encoder::new(decoder);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = rng.gen_range(min_words..=max_words);
    let stop = match decoder.language() {
        Language::English => ".",
        Language::Hindi => "।",
        Language::Tamil => ".",
    };
    let mut words: Vec<String> = Vec::with_capacity(n);
    while words.len() < n {
        let mut w = if decoder.language() == Language::English && rng.gen_bool(0.04) {
            rng.gen_range(0..10_000u32).to_string()
        } else {
            vocab.choose(&mut rng).expect("vocabulary is not empty").to_string()
        };
        let roll: f64 = rng.gen();
        if roll < 0.08 {
            w.push(',');
        } else if roll < 0.14 {
            w.push_str(stop);
        } else if decoder.language() == Language::English && roll < 0.16 {
            w.push(*[';', ':', '!'].choose(&mut rng).expect("non-empty"));
        }
        if enc.encode_word(&w).is_ok() {
            words.push(w);
        }
    }
    words.join(" ")
}

/// The degradation used to compare enhancement orders: gaussian noise of
/// sigma 8 and dark specks of radius 4 covering 0.05% of the page.
pub fn scan_noise(seed: u64) -> Vec<NoiseSpec> {
    vec![
        NoiseSpec { kind: NoiseKind::Gaussian { sigma: 8.0 }, seed },
        NoiseSpec { kind: NoiseKind::Speck { density: 0.0005, radius: 4.0, value: 0 }, seed: seed.wrapping_add(1) },
    ]
}

/// One synthetic test page with the text it was rendered from.
#[derive(Debug, Clone)]
pub struct SynthPage {
    pub name: String,
    pub page: RenderedPage,
}

/// `count` pages of 250-425 words, rendered clean and then degraded by
/// each noise spec in turn. Page `i` uses seed `seed + i`.
pub fn synthetic_pages(
    decoder: &Decoder,
    count: usize,
    seed: u64,
    g: &BrailleGeometry,
    style: &RenderStyle,
    noise: &[NoiseSpec],
) -> Result<Vec<SynthPage>, SynthError> {
    (0..count)
        .map(|i| {
            let s = seed + i as u64;
            let text = random_text(decoder, 250, 425, s);
            let mut page = render_page(&text, decoder, g, &RenderStyle { seed: s, ..*style })?;
            for spec in noise {
                let spec = NoiseSpec { seed: spec.seed.wrapping_add(s), ..*spec };
                page.image = add_noise(&page.image, &spec);
            }
            Ok(SynthPage { name: format!("{}-{:02}", decoder.language().code(), i + 1), page })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn vocabularies_are_mostly_writable() {
        for (lang, grade) in [(Language::English, 2), (Language::Hindi, 1), (Language::Tamil, 1)] {
            let dec = Decoder::shipped(lang, grade).unwrap();
            let raw = match lang {
                Language::English => ENGLISH,
                Language::Hindi => HINDI,
                Language::Tamil => TAMIL,
            };
            let total = raw.split_whitespace().count();
            let ok = vocabulary(&dec).len();
            assert!(ok * 10 >= total * 9, "{lang}: {ok}/{total}");
        }
    }

    #[test]
    fn english_text_uses_every_contraction() {
        let dec = Decoder::shipped(Language::English, 2).unwrap();
        let vocab = vocabulary(&dec);
        for w in ["but", "can", "from", "for", "of", "the", "with"] {
            assert!(vocab.contains(&w), "{w}");
        }
    }

    #[test]
    fn text_length_and_determinism() {
        let dec = Decoder::shipped(Language::Hindi, 1).unwrap();
        let a = random_text(&dec, 250, 425, 9);
        assert_eq!(a, random_text(&dec, 250, 425, 9));
        let n = a.split_whitespace().count();
        assert!((250..=425).contains(&n));
    }
}
