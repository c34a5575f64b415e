"""Exact credit bookkeeping for the clustering construction."""

import logging
import typing as t
from collections import defaultdict
from dataclasses import dataclass
from fractions import Fraction

from spanner_forge.exceptions import CreditExhausted, InvariantViolation

logger = logging.getLogger(__name__)

Account = t.Tuple[t.Any, ...]
Amount = t.Union[int, float, Fraction]

DEFERRED: Account = ("deferred",)


@dataclass(frozen=True)
class LedgerEvent:
    """One ledger movement.

    Args:
        kind: ``"mint"``, ``"transfer"`` or ``"debit"``.
        source: Account the credit leaves (None for mints).
        target: Account the credit enters (None for debits).
        amount: Moved credit.
        reason: Free-form description.
    """

    kind: str
    source: t.Optional[Account]
    target: t.Optional[Account]
    amount: Fraction
    reason: str

    def as_dict(self) -> t.Dict[str, t.Any]:
        """JSON-friendly form."""
        return {
            "kind": self.kind,
            "source": None if self.source is None else list(self.source),
            "target": None if self.target is None else list(self.target),
            "amount": float(self.amount),
            "reason": self.reason,
        }


def as_credit(amount: Amount) -> Fraction:
    """Exact rational value of an amount."""
    return amount if isinstance(amount, Fraction) else Fraction(amount)


class CreditLedger:
    """Balances of MST-edge and cluster accounts in exact arithmetic.

    Credit is created by :meth:`mint` and :meth:`mint_deferred`, moved with
    :meth:`transfer` and spent on spanner edges with :meth:`debit`. No
    balance may become negative.
    """

    def __init__(self):
        self._balances: t.Dict[Account, Fraction] = defaultdict(Fraction)
        self._events: t.List[LedgerEvent] = []
        self.minted = Fraction(0)
        self.spent = Fraction(0)
        self.deferred = Fraction(0)

    @property
    def events(self) -> t.List[LedgerEvent]:
        """All movements in order."""
        return list(self._events)

    def balance(self, account: Account) -> Fraction:
        """Current balance of an account."""
        return self._balances.get(account, Fraction(0))

    def accounts(self) -> t.List[Account]:
        """Accounts with a positive balance."""
        return [account for account, value in self._balances.items() if value > 0]

    @property
    def residual(self) -> Fraction:
        """Total credit not spent yet."""
        return sum(self._balances.values(), Fraction(0))

    def mint(self, account: Account, amount: Amount, reason: str = "") -> Fraction:
        """Create credit on an account."""
        amount = as_credit(amount)
        if amount < 0:
            raise InvariantViolation(f"Cannot mint negative credit {amount}")
        self._balances[account] += amount
        self.minted += amount
        self._events.append(LedgerEvent("mint", None, account, amount, reason))
        return amount

    def mint_deferred(
        self, account: Account, amount: Amount, reason: str = ""
    ) -> Fraction:
        """Create credit that is paid for after the last level."""
        amount = self.mint(account, amount, reason or "deferred")
        self.deferred += amount
        logger.debug("Deferred mint of %s for %s", float(amount), account)
        return amount

    def _withdraw(self, account: Account, amount: Fraction, reason: str) -> None:
        if amount < 0:
            raise InvariantViolation(f"Negative movement {amount} ({reason})")
        if self.balance(account) < amount:
            raise CreditExhausted(
                f"Account {account} holds {float(self.balance(account))} "
                f"but {float(amount)} is needed for {reason}",
                events=self._events,
            )
        self._balances[account] -= amount

    def transfer(
        self, source: Account, target: Account, amount: Amount, reason: str = ""
    ) -> Fraction:
        """Move credit between accounts.

        Raises:
            CreditExhausted: If the source cannot cover the amount.
        """
        amount = as_credit(amount)
        self._withdraw(source, amount, reason)
        self._balances[target] += amount
        self._events.append(LedgerEvent("transfer", source, target, amount, reason))
        return amount

    def debit(self, account: Account, amount: Amount, reason: str = "") -> Fraction:
        """Spend credit on spanner weight.

        Raises:
            CreditExhausted: If the account cannot cover the amount.
        """
        amount = as_credit(amount)
        self._withdraw(account, amount, reason)
        self.spent += amount
        self._events.append(LedgerEvent("debit", account, None, amount, reason))
        return amount

    def take(
        self,
        sources: t.Iterable[Account],
        target: Account,
        amount: Amount,
        reason: str = "",
    ) -> Fraction:
        """Collect up to ``amount`` from the sources in order.

        Returns:
            The part of ``amount`` that could not be collected.
        """
        missing = as_credit(amount)
        for source in sources:
            if missing <= 0:
                break
            if source == target:
                continue
            available = min(self.balance(source), missing)
            if available > 0:
                self.transfer(source, target, available, reason)
                missing -= available
        return max(missing, Fraction(0))

    def pay(
        self,
        sources: t.Iterable[Account],
        amount: Amount,
        reason: str = "",
    ) -> Fraction:
        """Spend ``amount`` drawing on the sources in order.

        Returns:
            The part of ``amount`` that could not be paid.
        """
        missing = as_credit(amount)
        for source in sources:
            if missing <= 0:
                break
            available = min(self.balance(source), missing)
            if available > 0:
                self.debit(source, available, reason)
                missing -= available
        return max(missing, Fraction(0))

    def check_conservation(self) -> None:
        """Assert ``minted == spent + residual`` exactly.

        Raises:
            InvariantViolation: If credit was created or lost.
        """
        if self.minted != self.spent + self.residual:
            raise InvariantViolation(
                f"Ledger out of balance: minted {self.minted}, spent {self.spent}, "
                f"residual {self.residual}"
            )
        if any(value < 0 for value in self._balances.values()):
            raise InvariantViolation("Ledger holds a negative balance")

    def summary(self) -> t.Dict[str, float]:
        """Totals as floats."""
        return {
            "minted": float(self.minted),
            "spent": float(self.spent),
            "residual": float(self.residual),
            "deferred": float(self.deferred),
            "events": len(self._events),
        }
