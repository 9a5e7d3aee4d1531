"""OTP delivery: an interface, an in-memory mailbox, and an SMTP client.

The mock mailbox is the default channel for demo and tests; the SMTP
channel exists for real deployments and is off unless configured.
"""

from __future__ import annotations

import threading
from dataclasses import dataclass

from .errors import DeliveryError


@dataclass(frozen=True)
class MailMessage:
    recipient: str
    session_id: str
    otps: tuple[str, ...]  # in set order; position semantics depend on order
    sent_at: int

    def __post_init__(self):
        object.__setattr__(self, "otps", tuple(self.otps))


class DeliveryChannel:
    def deliver(self, message: MailMessage) -> None:
        raise NotImplementedError


class MockMailbox(DeliveryChannel):
    """Per-recipient in-memory inbox, newest message last."""

    def __init__(self):
        self._lock = threading.Lock()
        self._boxes: dict[str, list[MailMessage]] = {}

    def deliver(self, message: MailMessage) -> None:
        with self._lock:
            self._boxes.setdefault(message.recipient, []).append(message)

    def read(self, recipient: str) -> list[MailMessage]:
        with self._lock:
            return list(self._boxes.get(recipient, []))

    def total_messages(self) -> int:
        with self._lock:
            return sum(len(box) for box in self._boxes.values())


class SmtpDelivery(DeliveryChannel):
    """Plain mail-submission client; construction is lazy, failures wrapped."""

    def __init__(self, host: str, port: int = 587, sender: str = "honeyauth@localhost"):
        self.host = host
        self.port = port
        self.sender = sender

    def deliver(self, message: MailMessage) -> None:
        import smtplib
        from email.message import EmailMessage

        mail = EmailMessage()
        mail["From"] = self.sender
        mail["To"] = message.recipient
        mail["Subject"] = "Your one-time passwords"
        mail.set_content(
            "One-time passwords for this login, in order:\n\n"
            + "\n".join(f"  {i + 1}. {otp}" for i, otp in enumerate(message.otps))
            + "\n\nEnter the one you chose at registration."
        )
        try:
            with smtplib.SMTP(self.host, self.port, timeout=10) as client:
                client.send_message(mail)
        except OSError as exc:
            raise DeliveryError(f"smtp delivery failed: {exc}") from exc
