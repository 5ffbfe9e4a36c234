// Generates a handful of map pairs, plans them and prints the verdicts.

#include <advmap/advmap.hpp>

#include <iostream>

int main()
{
    using namespace advmap;

    GenConfig gen;
    PlannerConfig planner;
    planner.mode = PlannerMode::limited;

    std::vector<Record> records = generate_records(gen, planner, 12, /*base_seed=*/42);
    plan_records(records, planner);

    IdentifyOptions opt;
    opt.rule_only = true; // no trained model here
    const Identification id = identify(entries_from_records(records), nullptr, opt);

    for (const auto& r : id.results) {
        const auto d = divergence(records[static_cast<std::size_t>(r.no - 1)].path_pair());
        std::cout << "pair " << r.no << ": " << to_string(r.label) << (r.attack ? "  attack" : "")
                  << "  (dx " << d.dx_max << ", dy " << d.dy_max << ")\n";
    }
    std::cout << id.adversarial.size() << " of " << id.results.size() << " adversarial maps succeeded\n";

    // Path image of the first pair, as ASCII: '.' background, 'o' original, 'a' adversarial only.
    const PathImage img = rasterize(records.front().path_pair());
    for (int y = 0; y < img.height(); ++y) {
        for (int x = 0; x < img.width(); ++x) {
            const Pixel p = img.at({x, y});
            std::cout << (p == Pixel::Original ? 'o' : p == Pixel::AdversarialOnly ? 'a' : '.');
        }
        std::cout << '\n';
    }
}
