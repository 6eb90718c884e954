#include "sonarpath/traversal.hpp"

#include "sonarpath/error.hpp"

#include <algorithm>
#include <chrono>

namespace sonarpath {

const char* to_string(StopReason reason) noexcept
{
    switch (reason) {
    case StopReason::none: return "none";
    case StopReason::max_paths: return "max_paths";
    case StopReason::max_seconds: return "max_seconds";
    case StopReason::external: return "external";
    }
    return "none";
}

const char* to_string(PathStatus status) noexcept
{
    switch (status) {
    case PathStatus::in_progress: return "in-progress";
    case PathStatus::final: return "final";
    case PathStatus::terminated_loop: return "terminated-loop";
    case PathStatus::dead_end: return "dead-end";
    }
    return "in-progress";
}

void check_config(const EngineConfig& config)
{
    if (config.rule_cap < kMinRuleCap || config.rule_cap > kMaxRuleCap)
        throw ValidationError("rule cap " + std::to_string(config.rule_cap) + " outside [1, 100]");
    if (config.stop.max_seconds && !(*config.stop.max_seconds >= 0.0))
        throw ValidationError("max seconds must be non-negative");
}

// ---------------------------------------------------------------------------

CompiledModel::CompiledModel(Network network)
    : network_(std::move(network)), index_(network_), rules_(compile_rules(index_))
{
}

std::shared_ptr<const CompiledModel> CompiledModel::compile(Network network)
{
    return std::shared_ptr<const CompiledModel>(new CompiledModel(std::move(network)));
}

ConnectionView Connection::view() noexcept
{
    return ConnectionView{{&start_state, &link_state, self_loop() ? &start_state : &end_state}};
}

const std::vector<RuleIndex>& ConnectionRecord::triggered_normal() const
{
    static const std::vector<RuleIndex> none;
    return extras ? extras->triggered_normal : none;
}

std::vector<const ConnectionRecord*> RealityPath::connections() const
{
    std::vector<const ConnectionRecord*> out;
    out.reserve(hops);
    for (const ConnectionRecord* r = tail.get(); r; r = r->previous.get())
        out.push_back(r);
    std::reverse(out.begin(), out.end());
    return out;
}

std::uint64_t reported_length(const RealityPath& path) noexcept { return path.hops == 0 ? 0 : path.hops + 1; }

// ---------------------------------------------------------------------------

FactBits TraversalResult::terminal_bits(const RealityPath& path, EntitySlot slot) const
{
    for (const ConnectionRecord* r = path.tail.get(); r; r = r->previous.get()) {
        // the end clone is the most recent write when start and end coincide
        if (r->end == slot)
            return variant_bits(r->end_variant);
        if (r->link == slot)
            return variant_bits(r->link_variant);
        if (r->start == slot)
            return variant_bits(r->start_variant);
        if (r->extras)
            for (const auto& [s, v] : r->extras->remote_variants)
                if (s == slot)
                    return variant_bits(v);
    }
    return model->index().base_bits(slot);
}

bool TraversalResult::terminal_value(const RealityPath& path, FactIndex fact) const
{
    const ModelIndex& index = model->index();
    const EntitySlot owner = index.fact_owner(fact);
    const unsigned pos = index.fact_position(fact);
    if (owner != kNoEntity)
        return bit_of(terminal_bits(path, owner), pos);
    for (const ConnectionRecord* r = path.tail.get(); r; r = r->previous.get()) {
        if (!r->extras)
            continue;
        const auto& writes = r->extras->environment_writes;
        for (auto it = writes.rbegin(); it != writes.rend(); ++it)
            if (it->first == pos)
                return it->second;
    }
    return index.base_environment()[pos];
}

// ---------------------------------------------------------------------------

namespace {

// Read/write access to every fact as one candidate connection sees it:
// connection clones, then remote clones, then the path's active variants,
// then the base network; environment facts come from the candidate's copy.
class CandidateResolver final : public FactResolver {
public:
    CandidateResolver(Connection& c, const Traversal& t, const RealityPath& p) : conn_(c), traversal_(t), path_(p) {}

    [[nodiscard]] bool read(FactIndex fact) const override
    {
        const ModelIndex& index = traversal_.model().index();
        const EntitySlot owner = index.fact_owner(fact);
        const unsigned pos = index.fact_position(fact);
        if (owner == kNoEntity)
            return conn_.environment[pos];
        if (const EntityState* s = find(owner))
            return bit_of(s->bits, pos);
        return bit_of(traversal_.current_bits(path_, owner), pos);
    }

    void write(FactIndex fact, bool value) override
    {
        const ModelIndex& index = traversal_.model().index();
        const EntitySlot owner = index.fact_owner(fact);
        const unsigned pos = index.fact_position(fact);
        if (owner == kNoEntity) {
            conn_.environment[pos] = value;
            return;
        }
        EntityState* s = find(owner);
        if (!s) {
            conn_.remote.push_back({owner, traversal_.current_bits(path_, owner)});
            s = &conn_.remote.back();
        }
        s->bits = with_bit(s->bits, pos, value);
    }

private:
    EntityState* find(EntitySlot slot) const
    {
        if (slot == conn_.start)
            return &conn_.start_state;
        if (slot == conn_.link)
            return &conn_.link_state;
        if (slot == conn_.end)
            return &conn_.end_state;
        for (auto& r : conn_.remote)
            if (r.slot == slot)
                return &r;
        return nullptr;
    }

    Connection& conn_;
    const Traversal& traversal_;
    const RealityPath& path_;
};

} // namespace

Traversal::Traversal(std::shared_ptr<const CompiledModel> model, EngineConfig config, RunHooks hooks,
                     std::shared_ptr<VariantStore> store)
    : model_(std::move(model)), config_(std::move(config)), hooks_(std::move(hooks)), store_(std::move(store))
{
    check_config(config_);
    if (!store_)
        store_ = std::make_shared<VariantStore>();
    const ModelIndex& index = model_->index();
    start_ = index.slot_of(config_.start);
    end_ = index.slot_of(config_.end);
    if (start_ == kNoEntity || index.is_link(start_))
        throw ReferenceError("unknown start container '" + config_.start + "'");
    if (end_ == kNoEntity || index.is_link(end_))
        throw ReferenceError("unknown end container '" + config_.end + "'");
}

RealityPath Traversal::seed() const
{
    RealityPath path;
    path.head = start_;
    path.active.assign(model_->index().entity_count(), kNoVariant);
    path.environment = model_->index().base_environment();
    return path;
}

FactBits Traversal::current_bits(const RealityPath& path, EntitySlot slot) const
{
    const VariantId v = path.active.empty() ? kNoVariant : path.active[slot];
    return v == kNoVariant ? model_->index().base_bits(slot) : store_->get(v).configuration;
}

Connection Traversal::clone_connection(const RealityPath& path, EntitySlot link) const
{
    const ModelIndex& index = model_->index();
    Connection c;
    c.start = index.link_from(link);
    c.link = link;
    c.end = index.link_to(link);
    c.start_state = {c.start, current_bits(path, c.start)};
    c.link_state = {c.link, current_bits(path, c.link)};
    c.end_state = {c.end, current_bits(path, c.end)};
    c.environment = path.environment;
    return c;
}

Connection Traversal::clone_connection(const RealityPath& path, std::string_view start, std::string_view link,
                                       std::string_view end) const
{
    const ModelIndex& index = model_->index();
    const EntitySlot l = index.slot_of(link);
    if (l == kNoEntity || !index.is_link(l))
        throw ReferenceError("unknown link '" + std::string(link) + "'");
    if (index.entity_id(index.link_from(l)) != start || index.entity_id(index.link_to(l)) != end)
        throw ReferenceError("link '" + std::string(link) + "' does not run from '" + std::string(start) + "' to '" +
                             std::string(end) + "'");
    return clone_connection(path, l);
}

void Traversal::run_rules(Connection& connection, const RealityPath& path) const
{
    const ModelIndex& index = model_->index();
    const auto& rules = model_->rules();
    const ConnectionView view = connection.view();
    CandidateResolver resolver(connection, *this, path);

    std::vector<bool> triggered(rules.size(), false);
    int generic_count = 0;
    bool progress = true;
    while (progress) {
        progress = false;
        for (std::size_t i = 0; i < rules.size(); ++i) {
            if (triggered[i])
                continue;
            const CompiledRule& rule = rules[i];
            if (rule.kind == RuleKind::generic) {
                if (!match_generic_preconditions(rule, index, view))
                    continue;
                const ApplyOutcome applied = apply_generic_postconditions(rule, index, view);
                connection.skipped_postconditions += applied.skipped;
                connection.triggered_generic.push_back(rule.index);
                ++generic_count;
            } else {
                if (!evaluate_normal_rule(rule, resolver).triggered)
                    continue;
                connection.triggered_normal.push_back(rule.index);
            }
            triggered[i] = true;
            progress = true;
            connection.actions_fired.insert(connection.actions_fired.end(), rule.actions.begin(), rule.actions.end());
            if (generic_count >= config_.rule_cap)
                goto done;
        }
    }
done:
    if (connection.self_loop())
        connection.end_state = connection.start_state;
}

bool Traversal::connection_is_valid(const Connection& connection) const noexcept
{
    if (!connection.triggered_generic.empty())
        return true;
    return config_.normal_rules_authorize && !connection.triggered_normal.empty();
}

bool Traversal::check_path_termination(const RealityPath& path, const Connection& connection) const
{
    std::optional<VariantId> sv, lv, ev;
    bool resolved = false;
    for (const ConnectionRecord* r = path.tail.get(); r; r = r->previous.get()) {
        if (r->start != connection.start || r->link != connection.link || r->end != connection.end)
            continue;
        if (!resolved) {
            // a configuration never stored cannot repeat an earlier connection
            sv = store_->find(connection.start, connection.start_state.bits);
            lv = store_->find(connection.link, connection.link_state.bits);
            ev = store_->find(connection.end, connection.end_state.bits);
            if (!sv || !lv || !ev)
                return false;
            resolved = true;
        }
        if (r->start_variant == *sv && r->link_variant == *lv && r->end_variant == *ev)
            return true;
    }
    return false;
}

void Traversal::touch(VariantId id)
{
    if (id >= touched_.size())
        touched_.resize(std::max<std::size_t>(id + 1, touched_.size() * 2), false);
    if (touched_[id])
        return;
    touched_[id] = true;
    if (store_->get(id).kind == EntityKind::container)
        ++touched_containers_;
    else
        ++touched_links_;
}

RealityPath Traversal::commit_connection(const RealityPath& path, const Connection& connection)
{
    const ModelIndex& index = model_->index();
    RealityPath next;
    next.active = path.active;
    next.environment = connection.environment;

    auto register_state = [&](const EntityState& s) {
        const VariantId id = store_->intern(s.slot, index.kind(s.slot), s.bits).id;
        touch(id);
        next.active[s.slot] = id;
        return id;
    };

    auto record = std::make_shared<ConnectionRecord>();
    record->previous = path.tail;
    record->start = connection.start;
    record->link = connection.link;
    record->end = connection.end;
    record->start_variant = register_state(connection.start_state);
    record->link_variant = register_state(connection.link_state);
    record->end_variant = connection.self_loop() ? record->start_variant : register_state(connection.end_state);
    record->triggered_generic = connection.triggered_generic;

    const bool has_extras = !connection.triggered_normal.empty() || !connection.remote.empty() ||
                            connection.skipped_postconditions != 0 || !connection.actions_fired.empty() ||
                            connection.environment != path.environment;
    if (has_extras) {
        auto extras = std::make_unique<ConnectionExtras>();
        extras->triggered_normal = connection.triggered_normal;
        for (const auto& r : connection.remote)
            extras->remote_variants.emplace_back(r.slot, register_state(r));
        for (unsigned i = 0; i < connection.environment.size(); ++i)
            if (connection.environment[i] != path.environment[i])
                extras->environment_writes.emplace_back(i, connection.environment[i]);
        extras->skipped_postconditions = connection.skipped_postconditions;
        extras->actions_fired = connection.actions_fired;
        record->extras = std::move(extras);
    }

    tallies_.skipped_postconditions += connection.skipped_postconditions;
    tallies_.actions_triggered += connection.actions_fired.size();
    for (const auto a : connection.actions_fired) {
        const Action& action = model_->network().actions()[a];
        if (action.enabled && hooks_.execute_action) {
            hooks_.execute_action(action);
            ++tallies_.actions_executed;
        }
    }
    ++tallies_.connections_committed;

    next.head = connection.end;
    next.hops = path.hops + 1;
    next.tail = std::move(record);
    return next;
}

void Traversal::finalize_store_counts(TraversalResult& result) const
{
    result.variant_containers_created = touched_containers_;
    result.variant_links_created = touched_links_;
    result.tallies = tallies_;
}

TraversalResult Traversal::run()
{
    using clock = std::chrono::steady_clock;
    const auto started = clock::now();
    const auto deadline_reached = [&] {
        if (!config_.stop.max_seconds)
            return false;
        return std::chrono::duration<double>(clock::now() - started).count() >= *config_.stop.max_seconds;
    };

    TraversalResult result;
    result.model = model_;
    result.store = store_;
    result.config = config_;

    if (start_ == end_) {
        RealityPath p = seed();
        p.status = PathStatus::final;
        p.active.clear();
        p.environment.clear();
        result.final_paths.push_back(std::move(p));
        result.degenerate = true;
        finalize_store_counts(result);
        return result;
    }

    const ModelIndex& index = model_->index();
    std::vector<RealityPath> stack;
    stack.push_back(seed());
    std::vector<RealityPath> survivors;

    while (!stack.empty()) {
        if (hooks_.stop_flag && hooks_.stop_flag->load(std::memory_order_relaxed)) {
            result.stop_reason = StopReason::external;
            break;
        }
        if (config_.stop.max_paths && result.final_paths.size() >= *config_.stop.max_paths) {
            result.stop_reason = StopReason::max_paths;
            break;
        }
        if (deadline_reached()) {
            result.stop_reason = StopReason::max_seconds;
            break;
        }

        RealityPath path = std::move(stack.back());
        stack.pop_back();
        ++tallies_.paths_popped;

        if (path.head == end_) {
            path.status = PathStatus::final;
            path.active = {};
            path.environment = {};
            result.final_paths.push_back(std::move(path));
            continue;
        }

        survivors.clear();
        for (const EntitySlot link : index.outgoing(path.head)) {
            ++tallies_.candidates_evaluated;
            Connection candidate = clone_connection(path, link);
            run_rules(candidate, path);
            if (!connection_is_valid(candidate))
                continue;
            if (check_path_termination(path, candidate)) {
                ++tallies_.loop_terminated;
                continue;
            }
            survivors.push_back(commit_connection(path, candidate));
        }
        if (survivors.empty()) {
            ++tallies_.dead_ended;
            continue;
        }
        // lowest link id is popped first
        for (auto it = survivors.rbegin(); it != survivors.rend(); ++it)
            stack.push_back(std::move(*it));
    }

    result.partial = !stack.empty();
    if (!result.partial)
        result.stop_reason = StopReason::none;
    result.elapsed_seconds = std::chrono::duration<double>(clock::now() - started).count();
    finalize_store_counts(result);
    return result;
}

TraversalResult traverse(const Network& network, const EngineConfig& config, RunHooks hooks)
{
    Traversal t(CompiledModel::compile(network), config, std::move(hooks));
    return t.run();
}

} // namespace sonarpath
