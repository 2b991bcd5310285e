import enum
import logging
from dataclasses import dataclass, field

from core.services.params import is_infinite

logger = logging.getLogger(__name__)

MAX_ARRIVALS = 1_000_000


class ForkStatus(str, enum.Enum):
    IRRELEVANT = "irrelevant"
    RELEVANT = "relevant"
    ACTIVE = "active"


class CycleEvent(str, enum.Enum):
    SERVICE = "Service"
    MOVE_FUNDS = "MoveFunds"
    DOUBLE_SPENDING = "DoubleSpending"
    NOT_APPLICABLE = "NotApplicable"


@dataclass
class CycleState:
    a_len: int = 0
    h_len: int = 0
    common_prefix: int = 0
    fork_status: ForkStatus = ForkStatus.IRRELEVANT


@dataclass(frozen=True)
class CycleOutcome:
    adversary_blocks_to_offset: int
    honest_blocks_to_offset: int
    event: CycleEvent
    replaced_confirmed_blocks: int
    overridden: bool
    final_state: CycleState = field(compare=False)
    truncated: bool = False


class ArrivalStream:
    """Uniform draws from a numpy Generator, fetched in blocks."""

    def __init__(self, generator, block=4096):
        self._generator = generator
        self._block = block
        self._buffer = []
        self._position = 0

    def random(self):
        if self._position >= len(self._buffer):
            self._buffer = self._generator.random(self._block).tolist()
            self._position = 0
        value = self._buffer[self._position]
        self._position += 1
        return value


class _MerchantBlock:
    # honest block B at height 1, paying the merchant
    def __init__(self, k):
        self.k = k
        self.exists = False
        self.on_h_chain = True
        self.deepest = 0

    def honest_arrival(self, h_len, switched):
        self.exists = True
        if switched:
            self.on_h_chain = False
        if self.on_h_chain:
            self.deepest = h_len

    @property
    def confirmed(self):
        return self.deepest >= self.k

    def classify(self, overridden):
        if not self.exists:
            return CycleEvent.NOT_APPLICABLE
        if overridden or not self.on_h_chain:
            return CycleEvent.DOUBLE_SPENDING if self.confirmed else CycleEvent.MOVE_FUNDS
        return CycleEvent.SERVICE

    def replaced_blocks(self, event):
        if event is not CycleEvent.DOUBLE_SPENDING:
            return 0
        return self.deepest - self.k + 1


def _finish(state, watch, adversary_blocks, honest_blocks, overridden):
    event = watch.classify(overridden)
    return CycleOutcome(
        adversary_blocks_to_offset=adversary_blocks,
        honest_blocks_to_offset=honest_blocks,
        event=event,
        replaced_confirmed_blocks=watch.replaced_blocks(event),
        overridden=overridden,
        final_state=state,
    )


def _truncated(state, max_arrivals):
    logger.info("cycle truncated after %s arrivals a_len=%s h_len=%s", max_arrivals, state.a_len, state.h_len)
    return CycleOutcome(
        adversary_blocks_to_offset=0,
        honest_blocks_to_offset=0,
        event=CycleEvent.NOT_APPLICABLE,
        replaced_confirmed_blocks=0,
        overridden=False,
        final_state=state,
        truncated=True,
    )


def run_cycle_stubborn(params, level, k, rng, max_arrivals=MAX_ARRIVALS):
    alpha, gamma = params.alpha, params.gamma
    state = CycleState()
    watch = _MerchantBlock(k)
    for _ in range(max_arrivals):
        if rng.random() < alpha:
            state.a_len += 1
            if state.fork_status is ForkStatus.RELEVANT:
                state.fork_status = ForkStatus.IRRELEVANT
        else:
            switched = state.fork_status is ForkStatus.ACTIVE and rng.random() < gamma
            if switched:
                state.common_prefix = state.h_len
            state.h_len += 1
            watch.honest_arrival(state.h_len, switched)
            state.fork_status = ForkStatus.RELEVANT

        if state.h_len == state.a_len + 1:
            return _finish(state, watch, state.common_prefix, state.h_len - state.common_prefix, False)
        if state.a_len == state.h_len + 1 and state.a_len >= level:
            return _finish(state, watch, state.a_len, 0, True)
        if state.fork_status is ForkStatus.RELEVANT and level > state.a_len >= state.h_len:
            state.fork_status = ForkStatus.ACTIVE
    return _truncated(state, max_arrivals)


def run_cycle_stealth(params, level, k, rng, max_arrivals=MAX_ARRIVALS):
    alpha, gamma = params.alpha, params.gamma
    match_height = None if is_infinite(level) else level - 1
    state = CycleState()
    watch = _MerchantBlock(k)
    for _ in range(max_arrivals):
        if rng.random() < alpha:
            state.a_len += 1
            state.fork_status = ForkStatus.IRRELEVANT
        else:
            state.h_len += 1
            watch.honest_arrival(state.h_len, False)
            state.fork_status = ForkStatus.RELEVANT

        if state.h_len == state.a_len + 1:
            return _finish(state, watch, 0, state.h_len, False)
        if state.a_len == state.h_len + 1 and state.a_len >= level:
            return _finish(state, watch, state.a_len, 0, True)
        if state.fork_status is ForkStatus.RELEVANT and state.a_len == state.h_len == match_height:
            state.fork_status = ForkStatus.ACTIVE
            # the next block settles the tie
            if rng.random() < alpha:
                state.a_len += 1
                return _finish(state, watch, state.a_len, 0, True)
            switched = rng.random() < gamma
            if switched:
                state.common_prefix = state.a_len
            state.h_len += 1
            watch.honest_arrival(state.h_len, switched)
            return _finish(state, watch, state.common_prefix, state.h_len - state.common_prefix, False)
    return _truncated(state, max_arrivals)
