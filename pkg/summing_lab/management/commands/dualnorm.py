from banach.seqnorm import ClassId

from .norm import Command as NormCommand


class Command(NormCommand):
    help = "Norm in the dual class of a sequence class: `dualnorm linf x` is `norm dual(linf) x`"

    def resolve_class(self, text: str):
        return ClassId.dual(super().resolve_class(text))
