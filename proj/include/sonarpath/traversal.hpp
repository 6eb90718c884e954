#pragma once

#include "sonarpath/model_index.hpp"
#include "sonarpath/netmodel.hpp"
#include "sonarpath/rulelogic.hpp"
#include "sonarpath/variant_store.hpp"

#include <atomic>
#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace sonarpath {

inline constexpr int kMinRuleCap = 1;
inline constexpr int kMaxRuleCap = 100;

struct StopConditions {
    std::optional<std::uint64_t> max_paths;
    std::optional<double> max_seconds;

    bool operator==(const StopConditions&) const = default;
};

struct EngineConfig {
    int rule_cap = kMaxRuleCap; // ceiling on triggered generic rules per connection
    std::string start;
    std::string end;
    StopConditions stop;
    // When set, a connection on which only normal rules fired is traversable too.
    bool normal_rules_authorize = false;

    bool operator==(const EngineConfig&) const = default;
};

// Throws ValidationError on a cap outside [1, 100] or a negative stop limit.
void check_config(const EngineConfig& config);

// Runtime hooks that are not part of the reproducible configuration.
struct RunHooks {
    // Polled between path pops; setting it yields a partial result.
    const std::atomic<bool>* stop_flag = nullptr;
    // Invoked for each enabled action on a committed connection. Without it,
    // triggered actions are only recorded.
    std::function<void(const Action&)> execute_action;
};

// A network together with its index and compiled rules. Shared read-only by
// the engine and every result produced from it.
class CompiledModel {
public:
    static std::shared_ptr<const CompiledModel> compile(Network network);

    CompiledModel(const CompiledModel&) = delete;
    CompiledModel& operator=(const CompiledModel&) = delete;

    [[nodiscard]] const Network& network() const noexcept { return network_; }
    [[nodiscard]] const ModelIndex& index() const noexcept { return index_; }
    [[nodiscard]] const std::vector<CompiledRule>& rules() const noexcept { return rules_; }
    [[nodiscard]] const Rule& rule(RuleIndex i) const { return network_.rules()[i]; }

private:
    explicit CompiledModel(Network network);

    Network network_;
    ModelIndex index_;
    std::vector<CompiledRule> rules_;
};

// A candidate step: private post-rule clones of the (start, link, end)
// entities plus everything rule-running recorded on it.
struct Connection {
    EntitySlot start = kNoEntity;
    EntitySlot link = kNoEntity;
    EntitySlot end = kNoEntity;
    EntityState start_state;
    EntityState link_state;
    EntityState end_state; // mirrors start_state on a self-loop link
    std::vector<EntityState> remote; // entities outside the triple written by normal rules
    std::vector<bool> environment;   // the path's environment facts after rule-running
    std::vector<RuleIndex> triggered_generic;
    std::vector<RuleIndex> triggered_normal;
    std::uint32_t skipped_postconditions = 0;
    std::vector<std::uint32_t> actions_fired;

    [[nodiscard]] bool self_loop() const noexcept { return start == end; }
    [[nodiscard]] ConnectionView view() noexcept;
};

struct ConnectionExtras {
    std::vector<RuleIndex> triggered_normal;
    std::vector<std::pair<EntitySlot, VariantId>> remote_variants;
    std::vector<std::pair<unsigned, bool>> environment_writes; // environment position, new value
    std::uint32_t skipped_postconditions = 0;
    std::vector<std::uint32_t> actions_fired;
};

// A committed step. Records form a singly linked chain back to the path's
// origin and are shared between every path that branched after them.
struct ConnectionRecord {
    std::shared_ptr<const ConnectionRecord> previous;
    EntitySlot start = kNoEntity;
    EntitySlot link = kNoEntity;
    EntitySlot end = kNoEntity;
    VariantId start_variant = kNoVariant;
    VariantId link_variant = kNoVariant;
    VariantId end_variant = kNoVariant;
    std::vector<RuleIndex> triggered_generic;
    std::unique_ptr<const ConnectionExtras> extras; // null when nothing else happened

    [[nodiscard]] const std::vector<RuleIndex>& triggered_normal() const;
    [[nodiscard]] std::uint32_t skipped_postconditions() const noexcept
    {
        return extras ? extras->skipped_postconditions : 0;
    }
};

enum class PathStatus { in_progress, final, terminated_loop, dead_end };

class RealityPath {
public:
    EntitySlot head = kNoEntity;
    std::uint32_t hops = 0; // connections traversed
    PathStatus status = PathStatus::in_progress;
    std::shared_ptr<const ConnectionRecord> tail;
    // Working state, dropped once the path is stored as a result:
    std::vector<VariantId> active;  // most recent variant per entity slot, kNoVariant if untouched
    std::vector<bool> environment;  // this path's private environment facts

    // Committed connections, origin first.
    [[nodiscard]] std::vector<const ConnectionRecord*> connections() const;
};

// Reported length: containers visited, the start container included. A final
// path of n traversed connections has length n + 1; the degenerate
// start == end path has length 0.
[[nodiscard]] std::uint64_t reported_length(const RealityPath& path) noexcept;

struct TraversalTallies {
    std::uint64_t paths_popped = 0;
    std::uint64_t candidates_evaluated = 0;
    std::uint64_t connections_committed = 0;
    std::uint64_t dead_ended = 0;
    std::uint64_t loop_terminated = 0;
    std::uint64_t skipped_postconditions = 0;
    std::uint64_t actions_triggered = 0;
    std::uint64_t actions_executed = 0;
};

enum class StopReason { none, max_paths, max_seconds, external };

[[nodiscard]] const char* to_string(StopReason reason) noexcept;
[[nodiscard]] const char* to_string(PathStatus status) noexcept;

struct TraversalResult {
    std::shared_ptr<const CompiledModel> model;
    std::shared_ptr<const VariantStore> store;
    EngineConfig config;
    std::vector<RealityPath> final_paths;
    TraversalTallies tallies;
    bool partial = false;
    StopReason stop_reason = StopReason::none;
    bool degenerate = false;
    double elapsed_seconds = 0.0;
    // Distinct post-rule configurations registered by this run's committed
    // connections, whether newly inserted or already in the store.
    std::uint64_t variant_containers_created = 0;
    std::uint64_t variant_links_created = 0;

    // Value of an entity at the end of a path: its latest variant, else the base.
    [[nodiscard]] FactBits terminal_bits(const RealityPath& path, EntitySlot slot) const;
    [[nodiscard]] bool terminal_value(const RealityPath& path, FactIndex fact) const;
    [[nodiscard]] FactBits variant_bits(VariantId id) const { return store->get(id).configuration; }
};

// The enumeration engine. One instance serves one traversal; its low-level
// steps are public so each can be exercised on its own.
class Traversal {
public:
    // The store may be shared with earlier runs on the same network layout.
    Traversal(std::shared_ptr<const CompiledModel> model, EngineConfig config, RunHooks hooks = {},
              std::shared_ptr<VariantStore> store = nullptr);

    [[nodiscard]] const CompiledModel& model() const noexcept { return *model_; }
    [[nodiscard]] const VariantStore& store() const noexcept { return *store_; }
    [[nodiscard]] EntitySlot start_slot() const noexcept { return start_; }
    [[nodiscard]] EntitySlot end_slot() const noexcept { return end_; }

    // Empty path at the start container with the network's environment.
    [[nodiscard]] RealityPath seed() const;

    // Current fact values of an entity as the path sees it.
    [[nodiscard]] FactBits current_bits(const RealityPath& path, EntitySlot slot) const;

    // Clones start, link and end from the path's active variants, else the base.
    [[nodiscard]] Connection clone_connection(const RealityPath& path, EntitySlot link) const;
    // Id form; throws ReferenceError unless the link runs from start to end.
    [[nodiscard]] Connection clone_connection(const RealityPath& path, std::string_view start,
                                              std::string_view link, std::string_view end) const;

    // Fixpoint passes over the merged rule order, each rule at most once,
    // stopping as soon as the generic trigger count reaches the cap.
    void run_rules(Connection& connection, const RealityPath& path) const;

    [[nodiscard]] bool connection_is_valid(const Connection& connection) const noexcept;

    // True when an earlier connection of the path has the same triple and the
    // same post-rule configuration of all three entities.
    [[nodiscard]] bool check_path_termination(const RealityPath& path, const Connection& connection) const;

    // Registers post-rule configurations in the store and returns the extended path.
    [[nodiscard]] RealityPath commit_connection(const RealityPath& path, const Connection& connection);

    [[nodiscard]] TraversalResult run();

private:
    void touch(VariantId id);
    void finalize_store_counts(TraversalResult& result) const;

    std::shared_ptr<const CompiledModel> model_;
    EngineConfig config_;
    RunHooks hooks_;
    std::shared_ptr<VariantStore> store_;
    EntitySlot start_ = kNoEntity;
    EntitySlot end_ = kNoEntity;
    std::vector<bool> touched_;
    std::uint64_t touched_containers_ = 0;
    std::uint64_t touched_links_ = 0;
    TraversalTallies tallies_;
};

// Convenience: compile, run, return.
[[nodiscard]] TraversalResult traverse(const Network& network, const EngineConfig& config, RunHooks hooks = {});

} // namespace sonarpath
