from apps.corridas.serializers.serializer_config import RunConfigSerializer

__all__ = ["RunConfigSerializer"]
