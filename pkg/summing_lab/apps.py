from django.apps import AppConfig


class SummingLabConfig(AppConfig):
    default_auto_field = "django.db.models.BigAutoField"
    name = "summing_lab"
    verbose_name = "Summing operator lab"
