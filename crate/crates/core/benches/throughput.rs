use std::hint::black_box;
use std::path::Path;

use algorec_core::code_model::load_corpus;
use algorec_core::keyword::{self, KeywordFamily};
use algorec_core::llm::{run_batch, BatchOptions, MockBackend, PromptStyle, StyleKind};
use algorec_core::{shipped, structural, Algorithm, Execution, MethodRecord};
use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion, Throughput};

const COPIES: usize = 8;

fn corpus() -> Vec<MethodRecord> {
    let path = Path::new(env!("CARGO_MANIFEST_DIR")).join("fixtures/minicorpus/corpus.jsonl");
    let base = load_corpus(&path).expect("mini-corpus loads").records;
    (0..COPIES).flat_map(|_| base.iter().cloned()).collect()
}

fn modes() -> Vec<(&'static str, Execution)> {
    let mut m = vec![("sequential", Execution::Sequential)];
    if Execution::parallel_available() {
        m.push(("parallel", Execution::Parallel));
    }
    m
}

fn filters(c: &mut Criterion) {
    let records = corpus();
    let st_patterns = shipped::all_structural_patterns();
    let kw_patterns = shipped::keyword_patterns(KeywordFamily::RecallFocused);

    let mut g = c.benchmark_group("structural_filter");
    g.throughput(Throughput::Elements((records.len() * st_patterns.len()) as u64));
    for (name, exec) in modes() {
        g.bench_with_input(BenchmarkId::from_parameter(name), &exec, |b, &exec| {
            b.iter(|| {
                for p in &st_patterns {
                    black_box(structural::filter_corpus(p, &records, exec).partition.reduction);
                }
            })
        });
    }
    g.finish();

    let mut g = c.benchmark_group("keyword_filter");
    g.throughput(Throughput::Elements((records.len() * kw_patterns.len()) as u64));
    for (name, exec) in modes() {
        g.bench_with_input(BenchmarkId::from_parameter(name), &exec, |b, &exec| {
            b.iter(|| {
                for p in &kw_patterns {
                    black_box(keyword::filter_corpus(p, &records, exec).partition.reduction);
                }
            })
        });
    }
    g.finish();
}

fn classification(c: &mut Criterion) {
    let records = corpus();
    let backend = MockBackend::new();
    let style = PromptStyle::simple(StyleKind::Score);
    let mut g = c.benchmark_group("mock_batch");
    g.throughput(Throughput::Elements(records.len() as u64));
    for threads in [1, 8] {
        let name = if threads == 1 { "sequential" } else { "parallel" };
        let opts = BatchOptions {
            parallelism: threads,
            ..BatchOptions::default()
        };
        g.bench_with_input(BenchmarkId::from_parameter(name), &opts, |b, opts| {
            b.iter(|| black_box(run_batch(&style, Algorithm::BubbleSort, &records, &backend, opts).summary))
        });
    }
    g.finish();
}

criterion_group!(benches, filters, classification);
criterion_main!(benches);
