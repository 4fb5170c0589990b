//! Acceptance checks. Prints one PASS/FAIL line per criterion and exits
//! non-zero if any fail.

mod support;

use std::collections::BTreeMap;
use std::fs;
use std::panic::{self, AssertUnwindSafe};
use std::path::Path;
use std::process::ExitCode;
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use parasynth::augment::{
    combine_multi_target, combine_paraphrase, combine_storytelling, sample_to_ratio, Method, SyntheticPool,
};
use parasynth::cli::{
    cmd_analyze, cmd_augment, AnalyzeConfig, EmbeddingChoice, RunConfig, AUGMENTED_FILE, MANIFEST_FILE,
    REJECTS_FILE, REPORT_JSON, REPORT_TABLE,
};
use parasynth::corpus_io::{load_corpus, write_pairs, Corpus, Derivation, Format, Origin, SentencePair};
use parasynth::metrics::{
    corpus_bleu, cosine, diversity_report, mock_embedding, sentence_bleu, tokenize, ConfigEcho, Embedding,
    EmbeddingProvider, EmbeddingSource, MetricError,
};
use parasynth::parser::{parse_story, parse_variants};
use parasynth::prompt::{render_prompt, PromptKind, Strategy};
use parasynth::provider::ProviderConfig;

use support::{bleu_oracle, de, fixture, ko};

fn table_pair() -> SentencePair {
    SentencePair::original("p0001", "얼마정도 대출을 원하세요?", "Wie viel Kredit möchten Sie haben?", ko(), de())
        .unwrap()
}

fn parent(i: usize) -> SentencePair {
    SentencePair::original(
        format!("p{i:04}"),
        &format!("대출 {i}번을 원하세요?"),
        &format!("Möchten Sie Kredit Nummer {i}?"),
        ko(),
        de(),
    )
    .unwrap()
}

fn numbered(prefix: &str, n: usize) -> Vec<String> {
    (0..n).map(|i| format!("{prefix} Variante {i}.")).collect()
}

fn combination_algebra() {
    let p = table_pair();
    for ns in 0..=4 {
        for nt in 0..=4 {
            let got = combine_paraphrase(&p, &numbered("ko", ns), &numbered("de", nt)).unwrap();
            assert_eq!(got.pairs.len(), (ns + 1) * (nt + 1) - 1, "n_s={ns} n_t={nt}");
        }
    }
    for n in 1..=4 {
        assert_eq!(combine_multi_target(&p, &numbered("de", n)).unwrap().pairs.len(), n);
        let story: Vec<(String, String)> = numbered("ko", n).into_iter().zip(numbered("de", n)).collect();
        assert_eq!(combine_storytelling(&p, &story).unwrap().pairs.len(), n);
        assert_eq!(Method::MultiTarget.yield_per_parent(n), n);
        assert_eq!(Method::Storytelling.yield_per_parent(n), n);
        assert_eq!(Method::Paraphrase.yield_per_parent(n), (n + 1) * (n + 1) - 1);
    }
}

fn ratio_schedule() {
    let mut pool = SyntheticPool::new(Method::Storytelling, 3, 11);
    for i in 0..20 {
        let p = parent(i);
        let story: Vec<(String, String)> = numbered("ko", 3).into_iter().zip(numbered("de", 3)).collect();
        pool.insert(&p.id, combine_storytelling(&p, &story).unwrap().pairs).unwrap();
    }
    for (ratio, expected) in [(0.5, 10), (1.0, 20), (1.5, 30), (2.0, 40), (2.5, 50), (3.0, 60)] {
        for seed in [0, 1, 7, 12345] {
            let picked = sample_to_ratio(&pool, 20, ratio, seed).unwrap();
            assert_eq!(picked.len(), expected, "ratio {ratio}");
            let mut per_parent: BTreeMap<String, usize> = (0..20).map(|i| (parent(i).id, 0)).collect();
            for s in &picked {
                *per_parent.get_mut(&s.parent_id).unwrap() += 1;
            }
            let lo = per_parent.values().min().unwrap();
            let hi = per_parent.values().max().unwrap();
            assert!(hi - lo <= 1, "ratio {ratio} seed {seed}: {per_parent:?}");
        }
    }
}

const VOCAB: &[&str] = &["der", "die", "das", "Kredit", "Sie", "möchten", "wie", "viel", "Geld", "Bank", "?", "."];

fn random_sentence(rng: &mut ChaCha8Rng) -> Vec<&'static str> {
    let len = rng.random_range(1..=12);
    (0..len).map(|_| VOCAB[rng.random_range(0..VOCAB.len())]).collect()
}

fn bleu_oracle_equivalence() {
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let mut pairs = Vec::new();
    for _ in 0..100 {
        let h = random_sentence(&mut rng);
        let r = random_sentence(&mut rng);
        let (hs, rs) = (h.join(" "), r.join(" "));
        // the vocabulary survives tokenization unchanged
        assert_eq!(tokenize(&hs), h);
        let expected = bleu_oracle::sentence(&h, &r);
        let got = sentence_bleu(&hs, &rs);
        assert!((got - expected).abs() <= 1e-9, "{hs:?} vs {rs:?}: {got} != {expected}");
        pairs.push((h, r));
    }
    let strings: Vec<(String, String)> = pairs.iter().map(|(h, r)| (h.join(" "), r.join(" "))).collect();
    for chunk in [1, 7, 25, 100] {
        for (i, window) in strings.chunks(chunk).enumerate() {
            let got = corpus_bleu(window).unwrap();
            let expected = bleu_oracle::corpus(&pairs[i * chunk..i * chunk + window.len()]);
            assert!((got - expected).abs() <= 1e-9, "chunk {chunk}/{i}: {got} != {expected}");
        }
    }
}

fn metric_identities() {
    let x = "Wie viel Kredit möchten Sie haben?";
    assert!((sentence_bleu(x, x) - 100.0).abs() <= 1e-9);
    assert!((sentence_bleu("Kredit", "Kredit") - 100.0).abs() <= 1e-9);
    assert_eq!(sentence_bleu("eins zwei drei", "vier fünf sechs sieben"), 0.0);

    let a = mock_embedding(x).unwrap();
    let neg = Embedding::new(a.vector().iter().map(|v| -v).collect(), EmbeddingSource::Mock).unwrap();
    assert!((cosine(&a, &a).unwrap() - 1.0).abs() <= 1e-12);
    assert!((cosine(&a, &neg).unwrap() + 1.0).abs() <= 1e-12);

    let raw = Embedding::new(vec![3.0, -4.0, 0.5], EmbeddingSource::FileImport).unwrap();
    assert!((cosine(&raw, &raw).unwrap() - 1.0).abs() <= 1e-12);
    let short = Embedding::new(vec![1.0, 0.0], EmbeddingSource::FileImport).unwrap();
    assert!(matches!(cosine(&raw, &short), Err(MetricError::DimensionMismatch(3, 2))));
    let zero = Embedding::new(vec![0.0; 3], EmbeddingSource::FileImport).unwrap();
    assert!(matches!(cosine(&raw, &zero), Err(MetricError::ZeroVector)));
}

fn mock_run(input: &Path, out: &Path, cache: &Path) -> RunConfig {
    RunConfig {
        input: input.to_path_buf(),
        out: out.to_path_buf(),
        format: Format::Tsv,
        method: Method::Storytelling,
        n: 3,
        ratio: 2.0,
        seed: 42,
        provider: ProviderConfig {
            model: "mock".into(),
            ..ProviderConfig::default()
        },
        mock: true,
        cache_dir: cache.to_path_buf(),
        src_lang: ko(),
        tgt_lang: de(),
        max_failure_rate: 0.1,
    }
}

fn end_to_end_determinism() {
    let dir = tempfile::tempdir().unwrap();
    let input = fixture("finance_ko_de.tsv");
    let cache = dir.path().join("cache");
    let files = [AUGMENTED_FILE, MANIFEST_FILE, REJECTS_FILE];
    let mut runs = Vec::new();
    for run in 0..2 {
        let out = dir.path().join(format!("run{run}"));
        let summary = cmd_augment(&mock_run(&input, &out, &cache)).unwrap();
        assert_eq!(summary.manifest.original_count, 20);
        assert_eq!(summary.manifest.counts_by_origin["storytelling"], 40);
        if run == 1 {
            assert_eq!(summary.cache_hits, summary.requests);
            assert!(summary.requests > 0);
        }
        let report_dir = out.join("report");
        cmd_analyze(&AnalyzeConfig {
            input: input.clone(),
            format: Format::Tsv,
            augmented: summary.augmented_path.clone(),
            out: Some(report_dir.clone()),
            embeddings: EmbeddingChoice::Mock,
            src_lang: ko(),
            tgt_lang: de(),
        })
        .unwrap();
        let mut bytes: Vec<Vec<u8>> = files.iter().map(|f| fs::read(out.join(f)).unwrap()).collect();
        bytes.push(fs::read(report_dir.join(REPORT_JSON)).unwrap());
        bytes.push(fs::read(report_dir.join(REPORT_TABLE)).unwrap());
        runs.push(bytes);
    }
    assert!(runs[0] == runs[1], "outputs differ between runs");
}

fn prompt_bit_exactness() {
    let p = table_pair();
    let render = |kind, n| render_prompt(Strategy::new(kind, n).unwrap(), &p).unwrap().text;
    assert_eq!(
        render(PromptKind::ParaphraseSrc, 1),
        "얼마정도 대출을 원하세요?\nParaphrase the above sentence in Korean in 1 unique way."
    );
    assert_eq!(
        render(PromptKind::MultiTarget, 3),
        "얼마정도 대출을 원하세요?\nTranslate the above sentence to German in 3 unique ways."
    );
    assert_eq!(
        render(PromptKind::Storytelling, 3),
        "얼마정도 대출을 원하세요?\nWrite a three-sentence Korean story based on the above sentence, and translate each sentence into German."
    );
}

const STORY: [(&str, &str); 3] = [
    (
        "저는 대출을 1만 달러 정도 받고 싶습니다.",
        "Ich möchte gerne einen Kredit in Höhe von etwa 10.000 Dollar aufnehmen.",
    ),
    ("이 돈으로 비즈니스를 시작하려고 합니다.", "Ich möchte damit ein Geschäft starten."),
    (
        "대출 상환 기간은 3년 정도면 좋겠습니다.",
        "Die Rückzahlungsfrist für den Kredit sollte etwa 3 Jahre betragen.",
    ),
];

fn parser_fixtures() {
    let triple = parse_variants(
        "1. Wie viel Darlehen möchten Sie?\n2. Wie viel Geld möchten Sie ausleihen?\n3. Wie viel Kredit benötigen Sie?",
        3,
    )
    .unwrap();
    assert_eq!(
        triple.items,
        ["Wie viel Darlehen möchten Sie?", "Wie viel Geld möchten Sie ausleihen?", "Wie viel Kredit benötigen Sie?"]
    );
    assert!(triple.warnings.is_empty());

    let single = parse_variants("대출을 얼마 정도 받고 싶으세요?", 1).unwrap();
    assert_eq!(single.items, ["대출을 얼마 정도 받고 싶으세요?"]);

    let expected: Vec<(String, String)> = STORY.iter().map(|(k, d)| (k.to_string(), d.to_string())).collect();
    let interleaved: String = STORY.iter().flat_map(|(k, d)| [*k, *d]).collect::<Vec<_>>().join("\n");
    let block = format!(
        "{}\n\n{}",
        STORY.iter().map(|p| p.0).collect::<Vec<_>>().join("\n"),
        STORY.iter().map(|p| p.1).collect::<Vec<_>>().join("\n")
    );
    let labelled = format!(
        "Story:\n1. {}\n2. {}\n3. {}\n\nTranslation:\n1. {}\n2. {}\n3. {}",
        STORY[0].0, STORY[1].0, STORY[2].0, STORY[0].1, STORY[1].1, STORY[2].1
    );
    for raw in [interleaved, block, labelled] {
        let parsed = parse_story(&raw, 3).unwrap();
        assert_eq!(parsed.pairs, expected, "{raw}");
        assert!(parsed.warnings.is_empty(), "{:?}", parsed.warnings);
    }
}

fn report_consistency() {
    let originals: Vec<SentencePair> = (0..5).map(parent).collect();
    let corpus = Corpus::from_pairs(ko(), de(), originals.clone()).unwrap();
    let echo = ConfigEcho {
        strategy: "multi-target".into(),
        n: 1,
        model: "mock".into(),
        temperature: 1.0,
        max_output_tokens: 512,
        seed: 0,
        embeddings: EmbeddingSource::Mock,
    };

    let mut varied = Vec::new();
    for o in &originals {
        let alt = [format!("{} Bitte.", o.target), "Wie viel Geld möchten Sie?".to_string()];
        varied.extend(combine_multi_target(o, &alt).unwrap().pairs);
    }
    let report = diversity_report(&corpus, &varied, &EmbeddingProvider::Mock, echo.clone()).unwrap();
    assert_eq!(report.pair_count, 10);
    let n = report.per_pair.len() as f64;
    let cos = report.per_pair.iter().map(|s| s.cosine).sum::<f64>() / n;
    let bleu = report.per_pair.iter().map(|s| s.bleu).sum::<f64>() / n;
    assert!((report.mean_cosine - cos).abs() <= 1e-9);
    assert!((report.mean_sentence_bleu - bleu).abs() <= 1e-9);

    let copies: Vec<SentencePair> = originals
        .iter()
        .flat_map(|o| combine_multi_target(o, std::slice::from_ref(&o.target)).unwrap().pairs)
        .collect();
    let report = diversity_report(&corpus, &copies, &EmbeddingProvider::Mock, echo).unwrap();
    assert!((report.mean_cosine - 1.0).abs() <= 1e-9);
    assert!((report.mean_sentence_bleu - 100.0).abs() <= 1e-9);
}

fn round_trip() {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let mut pairs = Vec::with_capacity(10_000);
    let mut parents = Vec::new();
    for i in 0..2_000 {
        let p = SentencePair::original(
            format!("p{i:05}"),
            &format!("원문 {i} \"따옴표\" 문장"),
            &format!("Satz {i} mit \\ und \t Tab"),
            ko(),
            de(),
        )
        .unwrap();
        parents.push(p.clone());
        pairs.push(p);
    }
    while pairs.len() < 10_000 {
        let parent = &parents[rng.random_range(0..parents.len())];
        let k = pairs.len();
        let (origin, derivation) = match k % 3 {
            0 => (
                Origin::Paraphrase,
                Derivation::Paraphrase { src_index: rng.random_range(0..3), tgt_index: rng.random_range(1..3) },
            ),
            1 => (
                Origin::MultiTarget,
                Derivation::MultiTarget { index: rng.random_range(0..3), duplicate_of_original: k % 2 == 0 },
            ),
            _ => (Origin::Storytelling, Derivation::Storytelling { index: rng.random_range(0..3) }),
        };
        pairs.push(
            SentencePair::synthetic(
                parent,
                format!("{}#s{k}", parent.id),
                &format!("합성 {k} ✓"),
                &format!("Synthetisch {k} — ü"),
                origin,
                derivation,
            )
            .unwrap(),
        );
    }
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("big.jsonl");
    write_pairs(&pairs, &path, Format::Jsonl).unwrap();
    let loaded = load_corpus(&path, Format::Jsonl, (&ko(), &de())).unwrap();
    assert_eq!(loaded.pairs(), pairs.as_slice());
}

fn main() -> ExitCode {
    let criteria: [(&str, fn(), Duration); 9] = [
        ("1 combination algebra", combination_algebra, Duration::from_secs(1)),
        ("2 ratio schedule", ratio_schedule, Duration::from_secs(1)),
        ("3 BLEU oracle equivalence", bleu_oracle_equivalence, Duration::from_secs(5)),
        ("4 metric identities", metric_identities, Duration::from_secs(1)),
        ("5 end-to-end determinism", end_to_end_determinism, Duration::from_secs(10)),
        ("6 prompt bit-exactness", prompt_bit_exactness, Duration::from_secs(1)),
        ("7 parser fixtures", parser_fixtures, Duration::from_secs(1)),
        ("8 report self-consistency", report_consistency, Duration::from_secs(1)),
        ("9 JSONL round-trip", round_trip, Duration::from_secs(5)),
    ];
    panic::set_hook(Box::new(|_| {}));
    let mut failed = 0;
    for (name, check, budget) in criteria {
        let start = Instant::now();
        let outcome = panic::catch_unwind(AssertUnwindSafe(check));
        let elapsed = start.elapsed();
        let verdict = match outcome {
            Err(e) => {
                let msg = e
                    .downcast_ref::<String>()
                    .cloned()
                    .or_else(|| e.downcast_ref::<&str>().map(|s| s.to_string()))
                    .unwrap_or_default();
                Err(msg)
            }
            Ok(()) if elapsed > budget => Err(format!("took {elapsed:?}, budget {budget:?}")),
            Ok(()) => Ok(()),
        };
        match verdict {
            Ok(()) => println!("PASS  {name}  ({:.3}s)", elapsed.as_secs_f64()),
            Err(msg) => {
                failed += 1;
                println!("FAIL  {name}  ({:.3}s): {msg}", elapsed.as_secs_f64());
            }
        }
    }
    println!("{} passed, {failed} failed", 9 - failed);
    if failed == 0 { ExitCode::SUCCESS } else { ExitCode::FAILURE }
}
