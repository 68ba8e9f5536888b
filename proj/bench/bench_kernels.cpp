// Serial reference vs OpenMP kernels on a default-sized simulated dataset.

#include "shotlab/pipeline.hpp"
#include "shotlab/scoring.hpp"
#include "shotlab/simulator.hpp"
#include "shotlab/template.hpp"

#include <benchmark/benchmark.h>

using namespace shotlab;

namespace {

struct Fixture {
    PipelineConfig cfg;
    std::vector<ShotRecord> records;
    TrainingResult trained;

    Fixture()
    {
        const auto data = generate_dataset(1000, default_profiles(), 7, cfg);
        for (const auto& d : data) {
            try {
                records.push_back(prepare_shot(d.session, cfg, d.label));
            } catch (const Error&) {
            }
        }
        trained = train(records, cfg);
    }
};

const Fixture& fixture()
{
    static const Fixture f;
    return f;
}

Execution exec_of(const benchmark::State& state)
{
    return state.range(0) == 0 ? Execution::Serial : Execution::Parallel;
}

void BM_GenerateDataset(benchmark::State& state)
{
    const PipelineConfig cfg;
    const auto profiles = default_profiles();
    for (auto _ : state)
        benchmark::DoNotOptimize(generate_dataset(1000, profiles, 7, cfg, exec_of(state)));
}

void BM_BuildGroundTruth(benchmark::State& state)
{
    const auto& f = fixture();
    for (auto _ : state) {
        std::vector<ShotRecord> aligned;
        aligned.reserve(f.records.size());
        for (const auto& r : f.records)
            aligned.push_back(align_impact(r, f.trained.tmpl.impact_index));
        benchmark::DoNotOptimize(build_ground_truth(aligned, f.cfg, exec_of(state)));
    }
}

void BM_ScoreBatch(benchmark::State& state)
{
    const auto& f = fixture();
    for (auto _ : state)
        benchmark::DoNotOptimize(score_batch(f.records, f.trained.tmpl, f.trained.model, f.cfg, exec_of(state)));
}

void BM_Train(benchmark::State& state)
{
    const auto& f = fixture();
    for (auto _ : state)
        benchmark::DoNotOptimize(train(f.records, f.cfg, exec_of(state)));
}

} // namespace

BENCHMARK(BM_GenerateDataset)->Arg(0)->Arg(1)->ArgName("parallel")->Unit(benchmark::kMillisecond);
BENCHMARK(BM_BuildGroundTruth)->Arg(0)->Arg(1)->ArgName("parallel")->Unit(benchmark::kMillisecond);
BENCHMARK(BM_ScoreBatch)->Arg(0)->Arg(1)->ArgName("parallel")->Unit(benchmark::kMillisecond);
BENCHMARK(BM_Train)->Arg(0)->Arg(1)->ArgName("parallel")->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
